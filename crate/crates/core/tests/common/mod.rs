#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectralfield::calculus::EigenContext;
use spectralfield::linalg::{Matrix, SymMatrix};
use spectralfield::polyfield::{Monomial, PolyMatrixField, Polynomial};
use spectralfield::sampling::{random_field, random_orthogonal, random_point, random_polynomial, unit_vec};
use spectralfield::spectral::ClusterConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cfg() -> ClusterConfig {
    ClusterConfig::default()
}

/// Distance from `λ_j`'s group to the rest of the spectrum.
pub fn gap(ctx: &EigenContext) -> f64 {
    let d = ctx.decomposition();
    d.isolation(d.group_index(ctx.j()).unwrap())
}

pub struct Trial {
    pub field: PolyMatrixField,
    pub x: Vec<f64>,
    pub j: usize,
    pub e: Vec<f64>,
    pub ctx: EigenContext,
}

/// A random field (`m ∈ {2,3,4}`, `n ∈ {1,2,3}`, degree `≤ 3`) at a random
/// point where `λ_j` is isolated by more than `min_gap`.
pub fn separated_trial(rng: &mut ChaCha8Rng, min_gap: f64) -> Trial {
    loop {
        let m = rng.random_range(2..=4);
        let n = rng.random_range(1..=3);
        let degree = rng.random_range(1..=3);
        let field = random_field(m, n, degree, rng);
        let x = random_point(n, 1.0, rng);
        let j = rng.random_range(1..=m);
        let e = unit_vec(n, rng);
        let ctx = EigenContext::new(&field, &x, j, &cfg()).unwrap();
        if gap(&ctx) > min_gap {
            return Trial { field, x, j, e, ctx };
        }
    }
}

fn constant(n: usize, c: f64) -> Polynomial {
    Polynomial::constant(n, c)
}

/// `a(x) I + c(x) v(x) v(x)ᵀ` in `S(3)` with `c = 1 + x₁²` and affine `v`:
/// `a` is a double eigenvalue whose eigenspace `v(x)⊥` turns with `x`.
pub struct RotatingDoubleField {
    pub field: PolyMatrixField,
    pub a: Polynomial,
}

pub fn rotating_double_field(n: usize, rng: &mut ChaCha8Rng) -> RotatingDoubleField {
    let a = random_polynomial(n, 2, rng);
    let mut c = constant(n, 1.0);
    c = &c + &(&Polynomial::variable(n, 0).unwrap() * &Polynomial::variable(n, 0).unwrap());
    let v: Vec<Polynomial> = (0..3)
        .map(|_| {
            let mut p = constant(n, 2.0 * rng.random_range(-1.0..1.0));
            for axis in 0..n {
                let slope = rng.random_range(-0.5..0.5);
                p = &p + &Polynomial::variable(n, axis).unwrap().scale(slope);
            }
            p
        })
        .collect();
    let upper = (0..3)
        .map(|i| {
            (i..3)
                .map(|k| {
                    let rank_one = &c * &(&v[i] * &v[k]);
                    if i == k {
                        &a + &rank_one
                    } else {
                        rank_one
                    }
                })
                .collect()
        })
        .collect();
    RotatingDoubleField {
        field: PolyMatrixField::from_upper(n, upper).unwrap(),
        a,
    }
}

/// `Q diag(a(x), a(x), b(x)) Qᵀ` for a random constant orthogonal `Q` and
/// `b = a + 3 + x₁²`.
pub fn block_double_field(n: usize, rng: &mut ChaCha8Rng) -> RotatingDoubleField {
    let a = random_polynomial(n, 3, rng);
    let x1 = Polynomial::variable(n, 0).unwrap();
    let b = &(&a + &constant(n, 3.0)) + &(&x1 * &x1);
    let q: Matrix = random_orthogonal(3, rng);
    let upper = (0..3)
        .map(|i| {
            (i..3)
                .map(|k| {
                    let pa = q[(i, 0)] * q[(k, 0)] + q[(i, 1)] * q[(k, 1)];
                    let pb = q[(i, 2)] * q[(k, 2)];
                    &a.scale(pa) + &b.scale(pb)
                })
                .collect()
        })
        .collect();
    RotatingDoubleField {
        field: PolyMatrixField::from_upper(n, upper).unwrap(),
        a,
    }
}

/// Gradient of a polynomial from its symbolic partials.
pub fn poly_grad(p: &Polynomial, x: &[f64]) -> Vec<f64> {
    (0..p.dim())
        .map(|i| p.partial(i).unwrap().eval(x).unwrap())
        .collect()
}

/// Random unit vector in the column span of `basis`.
pub fn unit_in_span(basis: &Matrix, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w = nalgebra::DVector::from_vec(unit_vec(basis.ncols(), rng));
    (basis * w).iter().copied().collect()
}

pub fn univariate_line(x: &[f64], e: &[f64]) -> Vec<Polynomial> {
    x.iter()
        .zip(e)
        .map(|(xi, ei)| {
            Polynomial::new(1, vec![Monomial::new(*xi, vec![0]), Monomial::new(*ei, vec![1])]).unwrap()
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Independent eigenvalues (ascending) from nalgebra's symmetric solver.
pub fn reference_eigenvalues(x: &SymMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = x.as_matrix().clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
