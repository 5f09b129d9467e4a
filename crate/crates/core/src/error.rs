use thiserror::Error;

/// Errors raised by the field, spectral, calculus and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("count {k} out of range 0..={max}")]
    CountOutOfRange { k: usize, max: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("field entries ({i},{j}) and ({j},{i}) differ")]
    AsymmetricField { i: usize, j: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricMatrix { asymmetry: f64 },

    #[error("distinct eigenvalues {a} and {b} are too close for the product formula")]
    DegenerateGap { a: f64, b: f64 },

    /// The two algebraic routes to one derivative disagree. This is how a
    /// crossing (or any violated constant-dimension hypothesis) shows up.
    #[error("{quantity}: eigenvector form and trace form disagree by {discrepancy:e}")]
    InconsistentDerivative {
        quantity: &'static str,
        discrepancy: f64,
    },

    #[error("eigenvalue tracking unstable: gap {gap:e} below required {required:e}")]
    UnstableTracking { gap: f64, required: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}

pub(crate) fn check_finite(context: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}
