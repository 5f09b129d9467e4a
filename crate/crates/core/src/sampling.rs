//! Seeded random matrices, frames and polynomial fields.
//!
//! Shared by the brute-force oracle and the test suites.

use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

use crate::linalg::{Matrix, SymMatrix};
use crate::polyfield::{Monomial, PolyMatrixField, Polynomial};

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| normal(rng)).collect()
}

pub fn unit_vec(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v = normal_vec(len, rng);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Orthonormalizes the columns of `a` in place (two passes of modified
/// Gram-Schmidt). Returns false if a column collapsed.
fn orthonormalize(a: &mut Matrix) -> bool {
    let k = a.ncols();
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj = a.column(i).dot(&a.column(j));
                let ci = a.column(i).clone_owned();
                let mut cj = a.column_mut(j);
                cj.axpy(-proj, &ci, 1.0);
            }
        }
        let norm = a.column(j).norm();
        if norm < 1e-10 {
            return false;
        }
        a.column_mut(j).scale_mut(1.0 / norm);
    }
    true
}

/// An `m×k` matrix with orthonormal columns, uniformly distributed on the
/// Stiefel manifold (orthonormalized standard-normal entries).
pub fn random_orthonormal_frame(m: usize, k: usize, rng: &mut impl Rng) -> Matrix {
    assert!(k <= m, "frame wider than ambient space");
    loop {
        let mut a = Matrix::from_fn(m, k, |_, _| normal(rng));
        if orthonormalize(&mut a) {
            return a;
        }
    }
}

pub fn random_orthogonal(m: usize, rng: &mut impl Rng) -> Matrix {
    random_orthonormal_frame(m, m, rng)
}

/// A uniformly random rank-`k` symmetric projection `QQᵀ`.
pub fn random_projection(m: usize, k: usize, rng: &mut impl Rng) -> SymMatrix {
    let q = random_orthonormal_frame(m, k, rng);
    SymMatrix::symmetrize(&q * q.transpose())
}

/// Symmetric matrix with independent standard-normal upper triangle.
pub fn random_symmetric(m: usize, rng: &mut impl Rng) -> SymMatrix {
    let mut a = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = normal(rng);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    SymMatrix::symmetrize(a)
}

/// Symmetric matrix `Q diag(values) Qᵀ` with a random orthogonal `Q`.
pub fn symmetric_with_spectrum(values: &[f64], rng: &mut impl Rng) -> SymMatrix {
    let q = random_orthogonal(values.len(), rng);
    let d = Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(values));
    SymMatrix::symmetrize(&q * d * q.transpose())
}

/// A dense random polynomial of total degree at most `degree` with
/// standard-normal coefficients.
pub fn random_polynomial(n: usize, degree: u32, rng: &mut impl Rng) -> Polynomial {
    let terms = exponent_vectors(n, degree)
        .into_iter()
        .map(|e| Monomial::new(normal(rng), e))
        .collect();
    Polynomial::new(n, terms).expect("valid random polynomial")
}

/// All exponent vectors of length `n` with total degree `<= degree`.
pub fn exponent_vectors(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(n, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, degree, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A random symmetric field whose upper-triangular entries are independent
/// random polynomials of degree `<= degree`.
pub fn random_field(m: usize, n: usize, degree: u32, rng: &mut impl Rng) -> PolyMatrixField {
    let upper = (0..m)
        .map(|i| (i..m).map(|_| random_polynomial(n, degree, rng)).collect())
        .collect();
    PolyMatrixField::from_upper(n, upper).expect("valid random field")
}

pub fn random_point(n: usize, radius: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-radius..radius)).collect()
}
