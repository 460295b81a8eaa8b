//! Book chapters, included as doc-tests.
