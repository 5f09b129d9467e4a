//! Closed-form derivatives of eigenvalues and eigenprojections.
//!
//! Everything is evaluated at a single point from the field's second-order
//! jet and the spectral decomposition there. The gradient and Hessian of an
//! eigenvalue are computed twice: once from a unit eigenvector `ξ` of the
//! group and once from traces against the eigenprojection. The two routes
//! agree whenever the eigenprojection is continuous near the point; when they
//! disagree the result is an [`Error::InconsistentDerivative`], which is how
//! crossings are detected.
//!
//! None of the formulas check the constant-dimension hypothesis themselves;
//! see [`crate::diagnostics`] for sample-based evidence.

use crate::error::{check_finite, check_len, Error, Result};
use crate::linalg::{trace_product, Matrix, SymMatrix};
use crate::polyfield::{FieldJet, PolyMatrixField, Polynomial};
use crate::spectral::{
    decompose, eig_sym, pseudoinverse, ClusterConfig, EigenGroup, SpectralDecomposition,
};

/// Relative tolerance for the gradient cross-check.
pub const GRADIENT_CROSSCHECK_TOL: f64 = 1e-8;
/// Relative tolerance for the Hessian cross-check.
pub const HESSIAN_CROSSCHECK_TOL: f64 = 1e-8;

/// The same derivative computed by the eigenvector route and the trace route.
#[derive(Debug, Clone)]
pub struct CrossCheck<T> {
    pub eigenvector_form: T,
    pub trace_form: T,
    /// Max-abs difference divided by `1 + max-abs(trace_form)`.
    pub discrepancy: f64,
}

/// `λ_j(x) + ∇λ_j(x) y + ½ yᵀ Hλ_j(x) y`.
#[derive(Debug, Clone)]
pub struct Expansion2 {
    pub base: f64,
    pub linear: Vec<f64>,
    pub quadratic: SymMatrix,
}

impl Expansion2 {
    /// Predicted `λ_j(x + y)`.
    pub fn predict(&self, y: &[f64]) -> Result<f64> {
        check_len("expansion displacement", self.linear.len(), y.len())?;
        let lin: f64 = self.linear.iter().zip(y).map(|(g, v)| g * v).sum();
        let n = y.len();
        let mut quad = 0.0;
        for i in 0..n {
            for k in 0..n {
                quad += y[i] * self.quadratic[(i, k)] * y[k];
            }
        }
        Ok(self.base + lin + 0.5 * quad)
    }

    /// Predicted `λ_j(x + h e)`, the directional form of the expansion.
    pub fn predict_along(&self, e: &[f64], h: f64) -> Result<f64> {
        let y: Vec<f64> = e.iter().map(|v| v * h).collect();
        self.predict(&y)
    }
}

/// Everything needed to differentiate `λ_j` and `P_j` at one point.
#[derive(Debug, Clone)]
pub struct EigenContext {
    point: Vec<f64>,
    jet: FieldJet,
    decomp: SpectralDecomposition,
    j: usize,
    group: usize,
    pinv: SymMatrix,
    xi: Vec<f64>,
}

impl EigenContext {
    /// Builds the context for repeated index `j` (1-based). `ξ` defaults to
    /// the first basis vector of the eigenspace.
    pub fn new(field: &PolyMatrixField, x: &[f64], j: usize, cfg: &ClusterConfig) -> Result<Self> {
        let jet = field.jet(x)?;
        let decomp = decompose(jet.value(), cfg)?;
        let group = decomp.group_index(j)?;
        let pinv = pseudoinverse(&decomp, j)?;
        let xi = decomp.groups()[group].basis.column(0).iter().copied().collect();
        Ok(EigenContext {
            point: x.to_vec(),
            jet,
            decomp,
            j,
            group,
            pinv,
            xi,
        })
    }

    /// Replaces `ξ` with the normalized projection of `xi` onto the
    /// eigenspace. Fails if `xi` is not (numerically) in the eigenspace.
    pub fn with_xi(mut self, xi: &[f64]) -> Result<Self> {
        check_len("eigenvector", self.m(), xi.len())?;
        check_finite("eigenvector", xi)?;
        let v = nalgebra::DVector::from_column_slice(xi);
        let pv = self.projection().as_matrix() * &v;
        let norm = v.norm();
        if norm == 0.0 || (&pv - &v).norm() > 1e-8 * norm {
            return Err(Error::InvalidArgument(
                "vector is not in the eigenspace".into(),
            ));
        }
        self.xi = (&pv / pv.norm()).iter().copied().collect();
        Ok(self)
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn m(&self) -> usize {
        self.jet.m()
    }

    pub fn n(&self) -> usize {
        self.jet.n()
    }

    pub fn jet(&self) -> &FieldJet {
        &self.jet
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn group(&self) -> &EigenGroup {
        &self.decomp.groups()[self.group]
    }

    /// `λ_j(x)`.
    pub fn lambda(&self) -> f64 {
        self.group().value
    }

    /// `d_j = tr P_j`.
    pub fn multiplicity(&self) -> usize {
        self.group().multiplicity
    }

    /// `P_j(x)`.
    pub fn projection(&self) -> &SymMatrix {
        &self.group().projection
    }

    /// `A_j(x)`.
    pub fn pseudoinverse(&self) -> &SymMatrix {
        &self.pinv
    }

    /// The unit eigenvector `ξ` used by the eigenvector-form formulas.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    fn inv_d(&self) -> f64 {
        1.0 / self.multiplicity() as f64
    }

    /// `D_e λ_j = (1/d_j) tr(P_j D_e H)`.
    pub fn dir_deriv_lambda(&self, e: &[f64]) -> Result<f64> {
        let de = self.jet.dir_deriv(e)?;
        Ok(self.inv_d() * trace_product(self.projection(), &de))
    }

    /// `D_e λ_j` from the eigenvector: `ξᵀ D_e H ξ`.
    pub fn dir_deriv_lambda_xi(&self, e: &[f64]) -> Result<f64> {
        let de = self.jet.dir_deriv(e)?;
        Ok(quad(&self.xi, &de, &self.xi))
    }

    /// `Qᵀ D_e H Q` for the orthonormal eigenspace basis `Q`. Under constant
    /// dimension this is `D_e λ_j · I`.
    pub fn compressed_dir_deriv(&self, e: &[f64]) -> Result<Matrix> {
        let de = self.jet.dir_deriv(e)?;
        let q = &self.group().basis;
        Ok(q.transpose() * de.as_matrix() * q)
    }

    /// Both routes to `∇λ_j`: `ξᵀ ∇_ξ H` and `[(1/d_j) tr(P_j ∂H/∂xᵢ)]ᵢ`.
    pub fn gradient_forms(&self) -> CrossCheck<Vec<f64>> {
        let jac = self.jet.jac_deriv(&self.xi).expect("ξ has length m");
        let xi_form: Vec<f64> = (0..self.n())
            .map(|k| (0..self.m()).map(|i| self.xi[i] * jac[(i, k)]).sum())
            .collect();
        let p = self.projection();
        let trace_form: Vec<f64> = (0..self.n())
            .map(|i| self.inv_d() * trace_product(p, self.jet.partial(i)))
            .collect();
        let discrepancy = rel_discrepancy(&xi_form, &trace_form);
        CrossCheck {
            eigenvector_form: xi_form,
            trace_form,
            discrepancy,
        }
    }

    /// `∇λ_j(x)` as a length-`n` row.
    pub fn grad_lambda(&self) -> Result<Vec<f64>> {
        let c = self.gradient_forms();
        if c.discrepancy > GRADIENT_CROSSCHECK_TOL {
            return Err(Error::InconsistentDerivative {
                quantity: "gradient",
                discrepancy: c.discrepancy,
            });
        }
        Ok(c.eigenvector_form)
    }

    /// Both routes to `Hλ_j`: `∇_ξ(∇_ξ H)ᵀ + 2(∇_ξ H)ᵀ A_j ∇_ξ H` and the
    /// entrywise trace formula.
    pub fn hessian_forms(&self) -> CrossCheck<SymMatrix> {
        let n = self.n();
        let jac = self.jet.jac_deriv(&self.xi).expect("ξ has length m");
        let second = self.jet.hess_quadform(&self.xi).expect("ξ has length m");
        let xi_form = SymMatrix::symmetrize(
            second.as_matrix() + jac.transpose() * self.pinv.as_matrix() * &jac * 2.0,
        );

        let p = self.projection().as_matrix();
        let a = self.pinv.as_matrix();
        // P ∂ᵢH A, reused across columns
        let left: Vec<Matrix> = (0..n)
            .map(|i| p * self.jet.partial(i).as_matrix() * a)
            .collect();
        let mut trace = Matrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let t = trace_product(p, self.jet.second_partial(i, k))
                    + 2.0 * trace_product(&left[i], self.jet.partial(k));
                trace[(i, k)] = self.inv_d() * t;
            }
        }
        let trace_form = SymMatrix::symmetrize(trace);
        let discrepancy = rel_discrepancy(xi_form.as_slice(), trace_form.as_slice());
        CrossCheck {
            eigenvector_form: xi_form,
            trace_form,
            discrepancy,
        }
    }

    /// `Hλ_j(x)`, `n×n`.
    pub fn hess_lambda(&self) -> Result<SymMatrix> {
        let c = self.hessian_forms();
        if c.discrepancy > HESSIAN_CROSSCHECK_TOL {
            return Err(Error::InconsistentDerivative {
                quantity: "hessian",
                discrepancy: c.discrepancy,
            });
        }
        Ok(c.eigenvector_form)
    }

    /// `D_b D_a λ_j = (1/d_j) tr(P_j [D_b D_a H + 2 D_a H A_j D_b H])`.
    pub fn second_dir_lambda(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let dab = self.jet.second_dir(a, b)?;
        let da = self.jet.dir_deriv(a)?;
        let db = self.jet.dir_deriv(b)?;
        let p = self.projection().as_matrix();
        let inner = dab.as_matrix() + da.as_matrix() * self.pinv.as_matrix() * db.as_matrix() * 2.0;
        Ok(self.inv_d() * trace_product(p, &inner))
    }

    /// `D_e P_j = P_j D_e H A_j + A_j D_e H P_j`.
    pub fn dir_deriv_proj(&self, e: &[f64]) -> Result<SymMatrix> {
        let de = self.jet.dir_deriv(e)?;
        let pda = self.projection().as_matrix() * de.as_matrix() * self.pinv.as_matrix();
        let t = pda.transpose();
        Ok(SymMatrix::symmetrize(pda + t))
    }

    /// `∇_q P_j = P_j ∇_{A_j q} H + A_j ∇_{P_j q} H`, an `m×n` matrix.
    pub fn jac_deriv_proj(&self, q: &[f64]) -> Result<Matrix> {
        check_len("matrix-side vector", self.m(), q.len())?;
        let qv = nalgebra::DVector::from_column_slice(q);
        let aq: Vec<f64> = (self.pinv.as_matrix() * &qv).iter().copied().collect();
        let pq: Vec<f64> = (self.projection().as_matrix() * &qv).iter().copied().collect();
        let j_aq = self.jet.jac_deriv(&aq)?;
        let j_pq = self.jet.jac_deriv(&pq)?;
        Ok(self.projection().as_matrix() * j_aq + self.pinv.as_matrix() * j_pq)
    }

    /// Second-order expansion of `λ_j` about the point.
    pub fn taylor2(&self) -> Result<Expansion2> {
        Ok(Expansion2 {
            base: self.lambda(),
            linear: self.grad_lambda()?,
            quadratic: self.hess_lambda()?,
        })
    }
}

fn quad(u: &[f64], m: &Matrix, v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ui) in u.iter().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            acc += ui * m[(i, k)] * vk;
        }
    }
    acc
}

fn rel_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    let scale = b.iter().fold(0.0_f64, |acc, y| acc.max(y.abs()));
    diff / (1.0 + scale)
}

/// `d/dt λ_j(x(t)) = (1/d_j) tr(P_j(x(t)) D_{x'(t)} H(x(t)))` for a polynomial
/// curve given as `n` univariate polynomials.
pub fn curve_deriv_lambda(
    field: &PolyMatrixField,
    curve: &[Polynomial],
    t: f64,
    j: usize,
    cfg: &ClusterConfig,
) -> Result<f64> {
    check_len("curve components", field.n(), curve.len())?;
    let mut x = Vec::with_capacity(curve.len());
    let mut velocity = Vec::with_capacity(curve.len());
    for c in curve {
        check_len("curve parameter dimension", 1, c.dim())?;
        x.push(c.eval(&[t])?);
        velocity.push(c.partial(0)?.eval(&[t])?);
    }
    EigenContext::new(field, &x, j, cfg)?.dir_deriv_lambda(&velocity)
}

/// One-sided derivatives of `ℓ_k(t) = λ₁ + … + λ_k` along `x + t e` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSidedDerivative {
    /// `lim_{h→0⁺} (ℓ_k(h) − ℓ_k(0))/h`.
    pub right: f64,
    /// `lim_{h→0⁻} (ℓ_k(h) − ℓ_k(0))/h`.
    pub left: f64,
}

/// Right derivative is the minimum, left the maximum, of `tr(R D_e H)` over
/// the rank-`k` projections `R` minimizing `tr(R H)`. That set is `P_below + W`
/// for every rank-`r` projection `W` inside the eigenspace of the group
/// containing `k`, so both extremes are partial sums of the compressed matrix
/// `Qᵀ D_e H Q`'s eigenvalues.
pub fn one_sided_sum_deriv(
    field: &PolyMatrixField,
    x: &[f64],
    e: &[f64],
    k: usize,
    cfg: &ClusterConfig,
) -> Result<OneSidedDerivative> {
    let m = field.m();
    if !(1..=m).contains(&k) {
        return Err(Error::CountOutOfRange { k, max: m });
    }
    let jet = field.jet(x)?;
    let decomp = decompose(jet.value(), cfg)?;
    let de = jet.dir_deriv(e)?;
    let g = decomp.group_index(k)?;
    let below: f64 = decomp.groups()[..g]
        .iter()
        .map(|h| trace_product(&h.projection, &de))
        .sum();
    let group = &decomp.groups()[g];
    let compressed = SymMatrix::symmetrize(group.basis.transpose() * de.as_matrix() * &group.basis);
    let values = eig_sym(&compressed)?.values;
    let r = k - group.first + 1;
    let right = below + values[..r].iter().sum::<f64>();
    let left = below + values[values.len() - r..].iter().sum::<f64>();
    Ok(OneSidedDerivative { right, left })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::{builtin, Monomial};

    fn ctx(field: &PolyMatrixField, x: &[f64], j: usize) -> EigenContext {
        EigenContext::new(field, x, j, &ClusterConfig::default()).unwrap()
    }

    fn assert_vec(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    fn constant_field() -> PolyMatrixField {
        PolyMatrixField::constant(2, &SymMatrix::from_diagonal(&[1.0, 2.0]))
    }

    fn univariate(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| Monomial::new(*c, vec![p as u32]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn directional_derivative_examples() {
        let c = ctx(&builtin::cubic(), &[1.0, 0.0], 2);
        assert!((c.dir_deriv_lambda(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!(c.dir_deriv_lambda(&[0.0, 1.0]).unwrap().abs() < 1e-14);
        assert!((c.dir_deriv_lambda_xi(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-14);
        let k = ctx(&constant_field(), &[0.3, 0.3], 1);
        assert_eq!(k.dir_deriv_lambda(&[1.0, -2.0]).unwrap(), 0.0);
    }

    #[test]
    fn gradient_examples() {
        let q = builtin::quartic();
        assert_vec(&ctx(&q, &[1.0, 0.0], 2).grad_lambda().unwrap(), &[2.0, 0.0], 1e-13);
        assert_vec(&ctx(&builtin::cubic(), &[1.0, 0.0], 1).grad_lambda().unwrap(), &[-1.0, 0.0], 1e-13);
        assert_vec(&ctx(&q, &[0.0, 0.0], 1).grad_lambda().unwrap(), &[0.0, 0.0], 0.0);
    }

    #[test]
    fn gradient_at_crossing_is_inconsistent() {
        let c = ctx(&builtin::cubic(), &[0.0, 0.0], 1);
        assert_eq!(c.multiplicity(), 2);
        assert!(matches!(
            c.grad_lambda(),
            Err(Error::InconsistentDerivative { quantity: "gradient", .. })
        ));
    }

    #[test]
    fn hessian_examples() {
        let h = ctx(&builtin::quartic(), &[1.0, 0.0], 2).hess_lambda().unwrap();
        assert!((h.as_matrix() - Matrix::identity(2, 2) * 2.0).norm() < 1e-13);
        let h = ctx(&builtin::cubic(), &[1.0, 0.0], 2).hess_lambda().unwrap();
        assert_vec(h.as_slice(), &[0.0, 0.0, 0.0, 1.0], 1e-13);
        let h = ctx(&constant_field(), &[5.0, 1.0], 2).hess_lambda().unwrap();
        assert_eq!(h, SymMatrix::zeros(2));
    }

    #[test]
    fn hessian_at_smooth_crossing_is_inconsistent() {
        // quartic eigenvalues are smooth at the origin, but P_j jumps there
        let c = ctx(&builtin::quartic(), &[0.0, 0.0], 1);
        assert!(c.grad_lambda().is_ok());
        assert!(matches!(
            c.hess_lambda(),
            Err(Error::InconsistentDerivative { quantity: "hessian", .. })
        ));
    }

    #[test]
    fn second_directional_examples() {
        let c = ctx(&builtin::quartic(), &[1.0, 0.0], 2);
        assert!((c.second_dir_lambda(&[0.0, 1.0], &[0.0, 1.0]).unwrap() - 2.0).abs() < 1e-13);
        assert!(c.second_dir_lambda(&[1.0, 0.0], &[0.0, 1.0]).unwrap().abs() < 1e-13);
        let k = ctx(&constant_field(), &[0.0, 0.0], 1);
        assert_eq!(k.second_dir_lambda(&[1.0, 1.0], &[0.5, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn projection_derivative_examples() {
        let c = ctx(&builtin::quartic(), &[1.0, 0.0], 2);
        let dp = c.dir_deriv_proj(&[0.0, 1.0]).unwrap();
        assert_vec(dp.as_slice(), &[0.0, -1.0, -1.0, 0.0], 1e-13);

        let jac = c.jac_deriv_proj(&[1.0, 0.0]).unwrap();
        assert_vec(jac.as_slice(), &Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]).as_slice().to_vec(), 1e-13);
        assert_eq!(c.jac_deriv_proj(&[0.0, 0.0]).unwrap(), Matrix::zeros(2, 2));

        let k = ctx(&constant_field(), &[0.0, 0.0], 1);
        assert_eq!(k.dir_deriv_proj(&[1.0, 1.0]).unwrap(), SymMatrix::zeros(2));

        // s = 1 everywhere: c(x)·I
        let x = Polynomial::variable(2, 0).unwrap();
        let z = Polynomial::zero(2);
        let scalar = PolyMatrixField::from_upper(2, vec![vec![x.clone(), z], vec![x]]).unwrap();
        let s = ctx(&scalar, &[0.7, 0.2], 1);
        assert_eq!(s.pseudoinverse(), &SymMatrix::zeros(2));
        assert_eq!(s.dir_deriv_proj(&[1.0, 0.0]).unwrap(), SymMatrix::zeros(2));
    }

    #[test]
    fn cubic_projection_derivative() {
        let c = ctx(&builtin::cubic(), &[1.0, 0.0], 2);
        let dp = c.dir_deriv_proj(&[0.0, 1.0]).unwrap();
        assert_vec(dp.as_slice(), &[0.0, -0.5, -0.5, 0.0], 1e-14);
    }

    #[test]
    fn with_xi_validates_membership() {
        let c = ctx(&builtin::quartic(), &[1.0, 0.0], 2);
        assert!(c.clone().with_xi(&[0.0, 1.0]).is_err());
        let c = c.with_xi(&[-3.0, 0.0]).unwrap();
        assert_vec(c.xi(), &[-1.0, 0.0], 0.0);
    }

    #[test]
    fn curve_examples() {
        let cfg = ClusterConfig::default();
        let cubic = builtin::cubic();
        let along_x = [univariate(&[1.0, 1.0]), univariate(&[0.0])];
        assert!((curve_deriv_lambda(&cubic, &along_x, 0.0, 2, &cfg).unwrap() - 1.0).abs() < 1e-14);
        let along_y = [univariate(&[1.0]), univariate(&[0.0, 1.0])];
        assert!(curve_deriv_lambda(&cubic, &along_y, 0.0, 2, &cfg).unwrap().abs() < 1e-14);
        let wobbly = [univariate(&[0.2, -1.0, 3.0]), univariate(&[1.0, 0.0, 0.0, 2.0])];
        assert_eq!(curve_deriv_lambda(&constant_field(), &wobbly, 0.4, 1, &cfg).unwrap(), 0.0);
        assert!(curve_deriv_lambda(&cubic, &along_x[..1], 0.0, 2, &cfg).is_err());
    }

    #[test]
    fn one_sided_examples() {
        let cfg = ClusterConfig::default();
        let cubic = builtin::cubic();
        let d = one_sided_sum_deriv(&cubic, &[0.0, 0.0], &[1.0, 0.0], 1, &cfg).unwrap();
        assert!((d.right + 1.0).abs() < 1e-14 && (d.left - 1.0).abs() < 1e-14);
        let d = one_sided_sum_deriv(&cubic, &[0.0, 0.0], &[1.0, 0.0], 2, &cfg).unwrap();
        assert!(d.right.abs() < 1e-14 && d.left.abs() < 1e-14);
        let d = one_sided_sum_deriv(&builtin::quartic(), &[1.0, 0.0], &[1.0, 0.0], 1, &cfg).unwrap();
        assert!((d.right + 2.0).abs() < 1e-13 && (d.left + 2.0).abs() < 1e-13);
        assert!(one_sided_sum_deriv(&cubic, &[0.0, 0.0], &[1.0, 0.0], 0, &cfg).is_err());
        assert!(one_sided_sum_deriv(&cubic, &[0.0, 0.0], &[1.0, 0.0], 3, &cfg).is_err());
    }

    #[test]
    fn expansion_examples() {
        let t = ctx(&builtin::quartic(), &[1.0, 0.0], 2).taylor2().unwrap();
        assert!((t.base - 1.0).abs() < 1e-15);
        assert_vec(&t.linear, &[2.0, 0.0], 1e-13);
        let (a, b) = (0.1, 0.1);
        let predicted = t.predict(&[a, b]).unwrap();
        assert!((predicted - (1.0 + 2.0 * a + a * a + b * b)).abs() < 1e-13);
        assert!((predicted - 1.22).abs() < 1e-13);

        let t = ctx(&constant_field(), &[0.0, 0.0], 1).taylor2().unwrap();
        assert_eq!((t.base, t.linear.clone()), (1.0, vec![0.0, 0.0]));
        assert_eq!(t.predict_along(&[1.0, 1.0], 3.0).unwrap(), 1.0);

        let t = ctx(&builtin::cubic(), &[1.0, 0.0], 2).taylor2().unwrap();
        for h in [1e-1, 1e-2] {
            let actual = (1.0_f64 + h * h).sqrt();
            let residual = actual - t.predict_along(&[0.0, 1.0], h).unwrap();
            let closed = (1.0 + h * h).sqrt() - 1.0 - h * h / 2.0;
            assert!((residual - closed).abs() < 1e-15);
        }
    }
}
