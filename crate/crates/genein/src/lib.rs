//! Generalised Einstein structures on Lie algebras.
//!
//! A generalised pseudo-Riemannian Lie algebra is a finite-dimensional real
//! Lie algebra `g` together with a (possibly indefinite) scalar product `g`,
//! a closed 3-form `H`, and a divergence operator `delta` on the double
//! `E = g + g*`. This crate represents such structures explicitly, decides
//! the generalised Einstein condition through algebraic residuals, computes
//! the associated curvature quantities, reduces symmetric endomorphisms on
//! Lorentzian spaces to canonical block forms, and ships a catalog of
//! classified solution families together with search tools for probing
//! non-existence claims.
//!
//! The binary `genein` exposes the same functionality on the command line;
//! see the `cli` module and the book under `book/` for a guided tour.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod einstein;
mod error;
pub mod io;
pub mod lie;
pub mod metric;
pub mod normal_form;
pub mod search;

mod guide;

pub use error::{Error, Result};

/// Default numerical tolerance for verification decisions.
pub const DEFAULT_TOL: f64 = 1e-9;
