//! Derivatives of eigenvalues and eigenprojections of polynomial symmetric
//! matrix fields `H: Rⁿ → S(m)`.

pub mod calculus;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod polyfield;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Matrix, SymMatrix, Vector};
