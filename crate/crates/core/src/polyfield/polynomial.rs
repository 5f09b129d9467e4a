use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_len, Error, Result};

/// Coefficients with magnitude below this are dropped on normalization.
pub const COEFFICIENT_FLOOR: f64 = 1e-300;

/// `coefficient · ∏ xᵢ^exponents[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coefficient: f64, exponents: Vec<u32>) -> Self {
        Monomial {
            coefficient,
            exponents,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .fold(self.coefficient, |acc, (&e, &xi)| match e {
                0 => acc,
                1 => acc * xi,
                _ => acc * xi.powi(e as i32),
            })
    }
}

/// A multivariate polynomial in a fixed number of variables.
///
/// Terms are kept in canonical form: sorted by exponent vector, no duplicate
/// exponent vectors, no (near-)zero coefficients. Two polynomials are equal
/// iff their canonical term lists are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "polynomial dimension must be positive".into(),
            ));
        }
        for t in &terms {
            check_len("monomial exponents", dim, t.exponents.len())?;
            if !t.coefficient.is_finite() {
                return Err(Error::NonFinite("monomial coefficient"));
            }
        }
        Ok(Self::normalized(dim, terms))
    }

    fn normalized(dim: usize, terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.exponents).or_insert(0.0) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= COEFFICIENT_FLOOR)
            .map(|(exponents, coefficient)| Monomial {
                coefficient,
                exponents,
            })
            .collect();
        Polynomial { dim, terms }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "polynomial dimension must be positive");
        Polynomial {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::normalized(dim, [Monomial::new(c, vec![0; dim])])
    }

    /// The coordinate function `x_axis` (0-based axis).
    pub fn variable(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let mut e = vec![0; dim];
        e[axis] = 1;
        Ok(Self::normalized(dim, [Monomial::new(1.0, e)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_len("polynomial evaluation point", self.dim, x.len())?;
        Ok(self.terms.iter().map(|t| t.eval(x)).sum())
    }

    /// Exact partial derivative along a 0-based axis.
    pub fn partial(&self, axis: usize) -> Result<Polynomial> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let terms = self.terms.iter().filter_map(|t| {
            let e = t.exponents[axis];
            (e > 0).then(|| {
                let mut exponents = t.exponents.clone();
                exponents[axis] = e - 1;
                Monomial::new(t.coefficient * f64::from(e), exponents)
            })
        });
        Ok(Self::normalized(self.dim, terms))
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Self::normalized(
            self.dim,
            self.terms
                .iter()
                .map(|t| Monomial::new(t.coefficient * c, t.exponents.clone())),
        )
    }

    fn assert_same_dim(&self, other: &Polynomial) {
        assert_eq!(
            self.dim, other.dim,
            "polynomial arithmetic across dimensions"
        );
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_dim(rhs);
        Polynomial::normalized(self.dim, self.terms.iter().chain(&rhs.terms).cloned())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_dim(rhs);
        let products = self.terms.iter().flat_map(|a| {
            rhs.terms.iter().map(move |b| {
                let exponents = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(x, y)| x + y)
                    .collect();
                Monomial::new(a.coefficient * b.coefficient, exponents)
            })
        });
        Polynomial::normalized(self.dim, products)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coefficient)?;
            for (i, &e) in t.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}
