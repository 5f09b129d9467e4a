use crate::error::{check_finite, Result};
use crate::linalg::{Matrix, SymMatrix};

/// Sweeps stop once the off-diagonal Frobenius norm falls to this fraction
/// of `‖X‖`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 100;

/// Sorted eigenvalues and an orthogonal matrix of eigenvectors.
///
/// `values` is non-decreasing (repeated eigenvalues `λ₁ ≤ … ≤ λ_m`) and
/// column `i` of `vectors` is a unit eigenvector for `values[i]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let m = a.nrows();
    let mut acc = 0.0;
    for p in 0..m {
        for q in 0..m {
            if p != q {
                acc += a[(p, q)] * a[(p, q)];
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eig_sym(x: &SymMatrix) -> Result<Spectrum> {
    check_finite("eigendecomposition input", x.as_slice())?;
    let m = x.dim();
    let mut a = x.as_matrix().clone();
    let mut v = Matrix::identity(m, m);
    let target = OFF_DIAGONAL_TOL * x.norm();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off == 0.0 || off <= target {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..m {
                    let g = a[(k, p)];
                    let h = a[(k, q)];
                    a[(k, p)] = c * g - s * h;
                    a[(k, q)] = s * g + c * h;
                }
                for k in 0..m {
                    let g = a[(p, k)];
                    let h = a[(q, k)];
                    a[(p, k)] = c * g - s * h;
                    a[(q, k)] = s * g + c * h;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..m {
                    let g = v[(k, p)];
                    let h = v[(k, q)];
                    v[(k, p)] = c * g - s * h;
                    v[(k, q)] = s * g + c * h;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(m, m, |r, c| v[(r, order[c])]);
    Ok(Spectrum { values, vectors })
}
