//! Dense matrix aliases and the symmetric matrix newtype.
//!
//! All norms are Frobenius norms, `‖X‖ = sqrt(tr XᵀX)`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_finite, Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative asymmetry accepted by [`SymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A real symmetric matrix, stored symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry, then stores `(X + Xᵀ)/2`.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                context: "symmetric matrix",
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        check_finite("symmetric matrix", m.as_slice())?;
        let asymmetry = (&m - m.transpose()).norm();
        if asymmetry > SYMMETRY_TOL * m.norm().max(1.0) {
            return Err(Error::AsymmetricMatrix { asymmetry });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without checking. Used for matrices that are symmetric by
    /// construction up to rounding.
    pub(crate) fn symmetrize(m: Matrix) -> Self {
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    /// Builds from row-major data of length `m*m`.
    pub fn from_row_slice(m: usize, data: &[f64]) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::DimensionMismatch {
                context: "row-major matrix data",
                expected: m * m,
                got: data.len(),
            });
        }
        Self::new(Matrix::from_row_slice(m, m, data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: m,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_slice(m, &data)
    }

    pub fn zeros(m: usize) -> Self {
        SymMatrix(Matrix::zeros(m, m))
    }

    pub fn identity(m: usize) -> Self {
        SymMatrix(Matrix::identity(m, m))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        SymMatrix(Matrix::from_diagonal(&Vector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Row-major nested rows, for reporting.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        to_rows(&self.0)
    }
}

impl Deref for SymMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
