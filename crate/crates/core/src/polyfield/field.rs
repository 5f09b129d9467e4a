use crate::error::{check_finite, check_len, Error, Result};
use crate::linalg::{Matrix, SymMatrix};

use super::polynomial::Polynomial;

/// A symmetric `m×m` matrix of polynomials in `n` variables.
///
/// Only the upper triangle is evaluated or differentiated; the lower triangle
/// is mirrored, so every evaluated value and derivative is bitwise symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrixField {
    m: usize,
    n: usize,
    // row-major, full grid
    entries: Vec<Polynomial>,
}

impl PolyMatrixField {
    /// Builds a field from a full `m×m` grid. Mirror entries must be
    /// identical polynomials.
    pub fn new(n: usize, grid: Vec<Vec<Polynomial>>) -> Result<Self> {
        let m = grid.len();
        if m == 0 {
            return Err(Error::InvalidArgument("field must have m >= 1".into()));
        }
        let mut entries = Vec::with_capacity(m * m);
        for row in grid {
            check_len("field grid row", m, row.len())?;
            for p in row {
                check_len("field entry dimension", n, p.dim())?;
                entries.push(p);
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if entries[i * m + j] != entries[j * m + i] {
                    return Err(Error::AsymmetricField { i, j });
                }
            }
        }
        Ok(PolyMatrixField { m, n, entries })
    }

    /// Builds a field from the upper triangle, row by row: row `i` holds
    /// entries `(i, i..m)`.
    pub fn from_upper(n: usize, upper: Vec<Vec<Polynomial>>) -> Result<Self> {
        let m = upper.len();
        let mut grid: Vec<Vec<Option<Polynomial>>> = vec![vec![None; m]; m];
        for (i, row) in upper.into_iter().enumerate() {
            check_len("upper-triangular row", m - i, row.len())?;
            for (k, p) in row.into_iter().enumerate() {
                let j = i + k;
                grid[j][i] = Some(p.clone());
                grid[i][j] = Some(p);
            }
        }
        let grid = grid
            .into_iter()
            .map(|row| row.into_iter().map(|p| p.expect("filled")).collect())
            .collect();
        Self::new(n, grid)
    }

    /// The Hessian field of a scalar potential: entries `∂²u/∂xᵢ∂xⱼ`.
    pub fn from_potential(u: &Polynomial) -> Result<Self> {
        let n = u.dim();
        let grads = (0..n).map(|i| u.partial(i)).collect::<Result<Vec<_>>>()?;
        let mut upper = Vec::with_capacity(n);
        for i in 0..n {
            upper.push(((i..n).map(|j| grads[i].partial(j))).collect::<Result<Vec<_>>>()?);
        }
        Self::from_upper(n, upper)
    }

    /// A field that is constant in `n` variables.
    pub fn constant(n: usize, value: &SymMatrix) -> Self {
        let m = value.dim();
        let entries = (0..m * m)
            .map(|k| Polynomial::constant(n, value[(k / m, k % m)]))
            .collect();
        PolyMatrixField { m, n, entries }
    }

    /// Matrix size `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Ambient dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.m + j]
    }

    fn map_upper(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<Self> {
        let m = self.m;
        let mut entries = vec![Polynomial::zero(self.n); m * m];
        for i in 0..m {
            for j in i..m {
                let p = f(self.entry(i, j))?;
                entries[j * m + i] = p.clone();
                entries[i * m + j] = p;
            }
        }
        Ok(PolyMatrixField {
            m,
            n: self.n,
            entries,
        })
    }

    /// The field of entrywise partial derivatives along a 0-based axis.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        self.map_upper(|p| p.partial(axis))
    }

    /// `H(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<SymMatrix> {
        check_len("field evaluation point", self.n, x.len())?;
        check_finite("field evaluation point", x)?;
        let m = self.m;
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = self.entry(i, j).eval(x)?;
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(SymMatrix::symmetrize(out))
    }

    /// Value, first and second partial derivatives of `H` at `x`.
    pub fn jet(&self, x: &[f64]) -> Result<FieldJet> {
        let value = self.eval(x)?;
        let first_fields = (0..self.n)
            .map(|i| self.partial(i))
            .collect::<Result<Vec<_>>>()?;
        let first = first_fields
            .iter()
            .map(|f| f.eval(x))
            .collect::<Result<Vec<_>>>()?;
        let n = self.n;
        let mut second = vec![SymMatrix::zeros(self.m); n * n];
        for i in 0..n {
            for k in i..n {
                let v = first_fields[i].partial(k)?.eval(x)?;
                second[k * n + i] = v.clone();
                second[i * n + k] = v;
            }
        }
        Ok(FieldJet {
            n,
            value,
            first,
            second,
        })
    }

    /// `D_e H(x) = Σᵢ eᵢ ∂H/∂xᵢ(x)`.
    pub fn dir_deriv(&self, e: &[f64], x: &[f64]) -> Result<SymMatrix> {
        self.jet(x)?.dir_deriv(e)
    }

    /// `∇_q H(x)`: the `m×n` Jacobian of `x ↦ H(x) q`.
    pub fn jac_deriv(&self, q: &[f64], x: &[f64]) -> Result<Matrix> {
        self.jet(x)?.jac_deriv(q)
    }

    /// `D_b D_a H(x) = Σ_{i,k} aᵢ b_k ∂²H/∂xᵢ∂x_k(x)`.
    pub fn second_dir(&self, a: &[f64], b: &[f64], x: &[f64]) -> Result<SymMatrix> {
        self.jet(x)?.second_dir(a, b)
    }

    /// `∇_ξ(∇_ξ H)ᵀ(x)`: the `n×n` Hessian of `x ↦ ξᵀ H(x) ξ`.
    pub fn hess_quadform(&self, xi: &[f64], x: &[f64]) -> Result<SymMatrix> {
        self.jet(x)?.hess_quadform(xi)
    }
}

/// Second-order jet of a field at one point.
#[derive(Debug, Clone)]
pub struct FieldJet {
    n: usize,
    value: SymMatrix,
    first: Vec<SymMatrix>,
    second: Vec<SymMatrix>,
}

impl FieldJet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.value.dim()
    }

    pub fn value(&self) -> &SymMatrix {
        &self.value
    }

    /// `∂H/∂xᵢ`.
    pub fn partial(&self, i: usize) -> &SymMatrix {
        &self.first[i]
    }

    /// `∂²H/∂xᵢ∂x_k`.
    pub fn second_partial(&self, i: usize, k: usize) -> &SymMatrix {
        &self.second[i * self.n + k]
    }

    fn check_direction(&self, v: &[f64]) -> Result<()> {
        check_len("direction", self.n, v.len())?;
        check_finite("direction", v)
    }

    fn check_vector(&self, v: &[f64]) -> Result<()> {
        check_len("matrix-side vector", self.m(), v.len())?;
        check_finite("matrix-side vector", v)
    }

    pub fn dir_deriv(&self, e: &[f64]) -> Result<SymMatrix> {
        self.check_direction(e)?;
        let m = self.m();
        let mut out = Matrix::zeros(m, m);
        for (ei, d) in e.iter().zip(&self.first) {
            out += d.as_matrix() * *ei;
        }
        Ok(SymMatrix::symmetrize(out))
    }

    pub fn jac_deriv(&self, q: &[f64]) -> Result<Matrix> {
        self.check_vector(q)?;
        let m = self.m();
        let mut out = Matrix::zeros(m, self.n);
        for (k, d) in self.first.iter().enumerate() {
            for i in 0..m {
                out[(i, k)] = (0..m).map(|l| d[(i, l)] * q[l]).sum();
            }
        }
        Ok(out)
    }

    pub fn second_dir(&self, a: &[f64], b: &[f64]) -> Result<SymMatrix> {
        self.check_direction(a)?;
        self.check_direction(b)?;
        let m = self.m();
        let mut out = Matrix::zeros(m, m);
        for i in 0..self.n {
            for k in 0..self.n {
                let w = a[i] * b[k];
                if w != 0.0 {
                    out += self.second_partial(i, k).as_matrix() * w;
                }
            }
        }
        Ok(SymMatrix::symmetrize(out))
    }

    pub fn hess_quadform(&self, xi: &[f64]) -> Result<SymMatrix> {
        self.check_vector(xi)?;
        let m = self.m();
        let n = self.n;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for k in i..n {
                let s = self.second_partial(i, k);
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        acc += xi[a] * s[(a, b)] * xi[b];
                    }
                }
                out[(i, k)] = acc;
                out[(k, i)] = acc;
            }
        }
        Ok(SymMatrix::symmetrize(out))
    }
}

/// The two Hessian fields used throughout as fixtures.
pub mod builtin {
    use super::PolyMatrixField;
    use crate::polyfield::{Monomial, Polynomial};

    /// `u(x, y) = (x³ − 3xy²)/6`.
    pub fn cubic_potential() -> Polynomial {
        Polynomial::new(
            2,
            vec![
                Monomial::new(1.0 / 6.0, vec![3, 0]),
                Monomial::new(-0.5, vec![1, 2]),
            ],
        )
        .expect("valid potential")
    }

    /// `u(x, y) = (x⁴ − 6x²y² + y⁴)/12`.
    pub fn quartic_potential() -> Polynomial {
        Polynomial::new(
            2,
            vec![
                Monomial::new(1.0 / 12.0, vec![4, 0]),
                Monomial::new(-0.5, vec![2, 2]),
                Monomial::new(1.0 / 12.0, vec![0, 4]),
            ],
        )
        .expect("valid potential")
    }

    /// Hessian of the cubic potential: `[[x, −y], [−y, −x]]`, eigenvalues
    /// `±sqrt(x² + y²)` crossing non-smoothly at the origin.
    pub fn cubic() -> PolyMatrixField {
        PolyMatrixField::from_potential(&cubic_potential()).expect("valid potential")
    }

    /// Hessian of the quartic potential: `[[x² − y², −2xy], [−2xy, y² − x²]]`,
    /// eigenvalues `±(x² + y²)` meeting smoothly at the origin.
    pub fn quartic() -> PolyMatrixField {
        PolyMatrixField::from_potential(&quartic_potential()).expect("valid potential")
    }

    pub fn by_name(name: &str) -> Option<PolyMatrixField> {
        match name {
            "cubic" => Some(cubic()),
            "quartic" => Some(quartic()),
            _ => None,
        }
    }

    pub const NAMES: &[&str] = &["cubic", "quartic"];
}
