//! Pointwise spectral machinery for one symmetric matrix.
//!
//! Eigenvalue indexes `j` are 1-based positions in the repeated, sorted list
//! `λ₁ ≤ … ≤ λ_m`. Eigenvalues closer than the clustering threshold are
//! treated as equal, and every public output built from eigenvectors is a
//! projection, so it does not depend on the eigenvector basis chosen.

mod decomposition;
mod jacobi;

pub use decomposition::{
    decompose, frobenius_covariants, kyfan_sum, pseudoinverse, ClusterConfig, EigenGroup,
    KyFanSum, SpectralDecomposition, DEFAULT_RELATIVE_GAP, FROBENIUS_GAP_TOL,
};
pub use jacobi::{eig_sym, Spectrum, OFF_DIAGONAL_TOL};
