use thiserror::Error;

/// Errors produced by construction, validation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("conflicting values for {entry}: {first} vs {second}")]
    ConflictingEntry {
        entry: String,
        first: f64,
        second: f64,
    },

    #[error("duplicate entry {entry}")]
    DuplicateEntry { entry: String },

    #[error("indices {entry} must be strictly increasing")]
    NonIncreasingIndices { entry: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("form degree {degree} exceeds dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("tensor kind mismatch: cannot pair an endomorphism with a form")]
    KindMismatch,

    #[error("Jacobi identity fails with residual {residual:.3e}")]
    JacobiFailure { residual: f64 },

    #[error("matrix is not symmetric, asymmetry {residual:.3e}")]
    NotSymmetric { residual: f64 },

    #[error("scalar product is degenerate (sigma_min/sigma_max = {ratio:.3e})")]
    DegenerateMetric { ratio: f64 },

    #[error("scalar product has signature ({pos},{neg}), expected {expected}")]
    WrongSignature {
        pos: usize,
        neg: usize,
        expected: String,
    },

    #[error("three-form is not closed, d H has sup norm {residual:.3e}")]
    NotClosed { residual: f64 },

    #[error("subspace is not an ideal, bracket leakage {residual:.3e}")]
    NotAnIdeal { residual: f64 },

    #[error("subspace is not a subalgebra, bracket leakage {residual:.3e}")]
    NotASubalgebra { residual: f64 },

    #[error("expected a subspace of codimension {expected}, got codimension {got}")]
    WrongCodimension { expected: usize, got: usize },

    #[error("restriction of the scalar product to the subspace is degenerate")]
    DegenerateRestriction,

    #[error("orthogonal complement admits no orthonormal basis (degenerate)")]
    DegenerateComplement,

    #[error(
        "structure is not generalised Einstein for zero divergence \
         (residual {residual:.3e}); admissible divergences are only defined \
         relative to a zero-divergence solution"
    )]
    NotEinsteinAtZeroDivergence { residual: f64 },

    #[error("endomorphism is not self-adjoint, residual {residual:.3e}")]
    NotSelfAdjoint { residual: f64 },

    #[error("eigenvalue clustering is ill-conditioned: {detail}")]
    IllConditioned { detail: String },

    #[error("unknown catalog entry `{name}`")]
    UnknownEntry { name: String },

    #[error("unknown family `{id}`")]
    UnknownFamily { id: String },

    #[error("family `{family}` is missing parameter `{name}`")]
    MissingParameter { family: String, name: String },

    #[error("family `{family}` does not accept parameter `{name}`: {reason}")]
    UnexpectedParameter {
        family: String,
        name: String,
        reason: String,
    },

    #[error("bad parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },

    #[error("family `{id}` carries no isomorphism labels")]
    NoIsomorphismLabel { id: String },

    #[error("bad grid specification: {reason}")]
    BadGrid { reason: String },

    #[error("invalid problem file: {detail}")]
    InvalidProblem { detail: String },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
