//! Numerical oracles that share no code path with the closed-form formulas:
//! central finite differences on sorted eigenvalues and eigenprojections,
//! brute-force Ky Fan minimization over random projections, and log-log
//! slope fitting of expansion residuals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::EigenContext;
use crate::error::{check_finite, check_len, Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::polyfield::PolyMatrixField;
use crate::sampling::random_orthonormal_frame;
use crate::spectral::{decompose, eig_sym, ClusterConfig, SpectralDecomposition};

/// Hessian stencils use this multiple of [`FdConfig::step`].
pub const HESSIAN_STEP_FACTOR: f64 = 10.0;

/// Required ratio between the spectral gap and the largest eigenvalue drift
/// a stencil can cause.
pub const TRACKING_SAFETY: f64 = 10.0;

/// Random projections drawn per parallel batch in [`kyfan_bruteforce`].
pub const KYFAN_BATCH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub richardson: bool,
}

impl FdConfig {
    pub fn new(step: f64, richardson: bool) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        Ok(FdConfig { step, richardson })
    }
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 1e-5,
            richardson: true,
        }
    }
}

/// An analytic derivative next to its oracle estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub quantity: String,
    pub analytic: Vec<f64>,
    pub oracle: Vec<f64>,
    /// `‖analytic − oracle‖`.
    pub discrepancy: f64,
    /// `‖analytic − oracle‖ / (1 + ‖analytic‖)`.
    pub relative: f64,
}

impl DerivativeReport {
    pub fn new(quantity: impl Into<String>, analytic: &[f64], oracle: &[f64]) -> Result<Self> {
        check_len("oracle comparison", analytic.len(), oracle.len())?;
        let discrepancy = analytic
            .iter()
            .zip(oracle)
            .map(|(a, o)| (a - o) * (a - o))
            .sum::<f64>()
            .sqrt();
        let norm = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(DerivativeReport {
            quantity: quantity.into(),
            analytic: analytic.to_vec(),
            oracle: oracle.to_vec(),
            discrepancy,
            relative: discrepancy / (1.0 + norm),
        })
    }

    pub fn within(&self, tol: f64) -> bool {
        self.relative <= tol
    }
}

/// Fails unless the gap around `λ_j`'s group exceeds
/// `TRACKING_SAFETY · displacement · L`, where `L = (Σᵢ ‖∂ᵢH(x)‖²)^½`
/// bounds the eigenvalue drift per unit displacement.
fn check_tracking(
    field: &PolyMatrixField,
    x: &[f64],
    j: usize,
    displacement: f64,
    cluster: &ClusterConfig,
) -> Result<SpectralDecomposition> {
    let jet = field.jet(x)?;
    let decomp = decompose(jet.value(), cluster)?;
    let gap = decomp.isolation(decomp.group_index(j)?);
    let lipschitz = (0..field.n())
        .map(|i| jet.partial(i).norm_squared())
        .sum::<f64>()
        .sqrt();
    let required = TRACKING_SAFETY * displacement * lipschitz;
    if gap <= required {
        return Err(Error::UnstableTracking { gap, required });
    }
    Ok(decomp)
}

fn lambda_at(field: &PolyMatrixField, x: &[f64], j: usize) -> Result<f64> {
    Ok(eig_sym(&field.eval(x)?)?.values[j - 1])
}

fn shifted(x: &[f64], steps: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, h) in steps {
        y[i] += h;
    }
    y
}

fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

fn check_point(field: &PolyMatrixField, x: &[f64], j: usize) -> Result<()> {
    check_len("point", field.n(), x.len())?;
    check_finite("point", x)?;
    if !(1..=field.m()).contains(&j) {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: field.m(),
        });
    }
    Ok(())
}

/// Central-difference gradient of the `j`-th sorted eigenvalue.
pub fn fd_grad_lambda(
    field: &PolyMatrixField,
    x: &[f64],
    j: usize,
    cfg: &FdConfig,
    cluster: &ClusterConfig,
) -> Result<Vec<f64>> {
    check_point(field, x, j)?;
    let h = cfg.step;
    check_tracking(field, x, j, h, cluster)?;
    let stencil = |h: f64| -> Result<Vec<f64>> {
        (0..field.n())
            .map(|i| {
                let up = lambda_at(field, &shifted(x, &[(i, h)]), j)?;
                let down = lambda_at(field, &shifted(x, &[(i, -h)]), j)?;
                Ok((up - down) / (2.0 * h))
            })
            .collect()
    };
    let coarse = stencil(h)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    Ok(richardson(&coarse, &stencil(h / 2.0)?))
}

/// Central-difference Hessian of the `j`-th sorted eigenvalue, with step
/// `HESSIAN_STEP_FACTOR · cfg.step`.
pub fn fd_hess_lambda(
    field: &PolyMatrixField,
    x: &[f64],
    j: usize,
    cfg: &FdConfig,
    cluster: &ClusterConfig,
) -> Result<SymMatrix> {
    check_point(field, x, j)?;
    let n = field.n();
    let h = HESSIAN_STEP_FACTOR * cfg.step;
    check_tracking(field, x, j, h * 2f64.sqrt(), cluster)?;
    let center = lambda_at(field, x, j)?;
    let stencil = |h: f64| -> Result<Vec<f64>> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let up = lambda_at(field, &shifted(x, &[(i, h)]), j)?;
            let down = lambda_at(field, &shifted(x, &[(i, -h)]), j)?;
            out[i * n + i] = (up - 2.0 * center + down) / (h * h);
            for k in i + 1..n {
                let pp = lambda_at(field, &shifted(x, &[(i, h), (k, h)]), j)?;
                let pm = lambda_at(field, &shifted(x, &[(i, h), (k, -h)]), j)?;
                let mp = lambda_at(field, &shifted(x, &[(i, -h), (k, h)]), j)?;
                let mm = lambda_at(field, &shifted(x, &[(i, -h), (k, -h)]), j)?;
                let v = (pp - pm - mp + mm) / (4.0 * h * h);
                out[i * n + k] = v;
                out[k * n + i] = v;
            }
        }
        Ok(out)
    };
    let coarse = stencil(h)?;
    let values = if cfg.richardson {
        richardson(&coarse, &stencil(h / 2.0)?)
    } else {
        coarse
    };
    Ok(SymMatrix::symmetrize(Matrix::from_row_slice(n, n, &values)))
}

/// Sum of the projections at `y` whose eigenvalues lie within `radius` of
/// `target`; their total rank must equal `rank`.
fn matched_projection(
    field: &PolyMatrixField,
    y: &[f64],
    target: f64,
    radius: f64,
    rank: usize,
    cluster: &ClusterConfig,
) -> Result<Matrix> {
    let decomp = decompose(&field.eval(y)?, cluster)?;
    let m = field.m();
    let mut p = Matrix::zeros(m, m);
    let mut matched = 0;
    let mut nearest_outside = f64::INFINITY;
    for g in decomp.groups() {
        let dist = (g.value - target).abs();
        if dist < radius {
            p += g.projection.as_matrix();
            matched += g.multiplicity;
        } else {
            nearest_outside = nearest_outside.min(dist);
        }
    }
    if matched != rank {
        return Err(Error::UnstableTracking {
            gap: nearest_outside,
            required: radius,
        });
    }
    Ok(p)
}

/// Central-difference directional derivative of `P_j` along `e`. The group
/// is matched at `x ± h e` by eigenvalue proximity: every eigenvalue within
/// half the gap of `λ_j(x)` contributes, and the matched rank must equal `d_j`.
pub fn fd_dproj(
    field: &PolyMatrixField,
    x: &[f64],
    j: usize,
    e: &[f64],
    cfg: &FdConfig,
    cluster: &ClusterConfig,
) -> Result<SymMatrix> {
    check_point(field, x, j)?;
    check_len("direction", field.n(), e.len())?;
    check_finite("direction", e)?;
    let e_norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = cfg.step;
    let decomp = check_tracking(field, x, j, h * e_norm, cluster)?;
    let l = decomp.group_index(j)?;
    let group = &decomp.groups()[l];
    let radius = 0.5 * decomp.isolation(l);
    let along = |t: f64| -> Vec<f64> { x.iter().zip(e).map(|(xi, ei)| xi + t * ei).collect() };
    let stencil = |h: f64| -> Result<Vec<f64>> {
        let up = matched_projection(field, &along(h), group.value, radius, group.multiplicity, cluster)?;
        let down = matched_projection(field, &along(-h), group.value, radius, group.multiplicity, cluster)?;
        Ok(((up - down) / (2.0 * h)).as_slice().to_vec())
    };
    let coarse = stencil(h)?;
    let values = if cfg.richardson {
        richardson(&coarse, &stencil(h / 2.0)?)
    } else {
        coarse
    };
    let m = field.m();
    Ok(SymMatrix::symmetrize(Matrix::from_column_slice(m, m, &values)))
}

/// Minimum of `tr(R X)` over `n_samples` random rank-`k` projections
/// `R = QQᵀ`. Batches of [`KYFAN_BATCH`] samples run in parallel, batch `b`
/// drawing from ChaCha8 seeded with `seed` on stream `b`.
pub fn kyfan_bruteforce(x: &SymMatrix, k: usize, n_samples: usize, seed: u64) -> Result<f64> {
    let m = x.dim();
    if k > m {
        return Err(Error::CountOutOfRange { k, max: m });
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if k == 0 {
        return Ok(0.0);
    }
    if k == m {
        return Ok(x.trace());
    }
    let batches = n_samples.div_ceil(KYFAN_BATCH);
    let best = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = KYFAN_BATCH.min(n_samples - b * KYFAN_BATCH);
            (0..count)
                .map(|_| {
                    let q = random_orthonormal_frame(m, k, &mut rng);
                    (q.transpose() * x.as_matrix() * &q).trace()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Residuals of the second-order expansion at decreasing steps and the
/// least-squares slope of `log r` against `log h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residuals at or below this are rounding noise and excluded from the fit.
    pub noise_floor: f64,
    /// `+∞` when `exact`.
    pub fitted_order: f64,
    /// Fewer than two residuals rose above the noise floor.
    pub exact: bool,
}

/// Fits the order of `|λ_j(x + h e) − expansion(h e)|` in `h`.
pub fn fit_expansion_order(
    field: &PolyMatrixField,
    x: &[f64],
    j: usize,
    e: &[f64],
    steps: &[f64],
    cluster: &ClusterConfig,
) -> Result<SlopeFit> {
    check_point(field, x, j)?;
    check_len("direction", field.n(), e.len())?;
    check_finite("direction", e)?;
    check_finite("steps", steps)?;
    if steps.len() < 2 {
        return Err(Error::InvalidArgument("need at least two steps".into()));
    }
    if steps[0] <= 0.0 || steps.windows(2).any(|w| w[1] >= w[0] || w[1] <= 0.0) {
        return Err(Error::InvalidArgument(
            "steps must be positive and strictly decreasing".into(),
        ));
    }
    let expansion = EigenContext::new(field, x, j, cluster)?.taylor2()?;
    let mut residuals = Vec::with_capacity(steps.len());
    let mut scale = 1.0_f64;
    for &h in steps {
        let y: Vec<f64> = x.iter().zip(e).map(|(xi, ei)| xi + h * ei).collect();
        let value = field.eval(&y)?;
        scale = scale.max(value.norm());
        let actual = eig_sym(&value)?.values[j - 1];
        residuals.push((actual - expansion.predict_along(e, h)?).abs());
    }
    let noise_floor = 64.0 * f64::EPSILON * scale;
    let (lx, ly): (Vec<f64>, Vec<f64>) = steps
        .iter()
        .zip(&residuals)
        .filter(|(_, &r)| r > noise_floor)
        .map(|(h, r)| (h.ln(), r.ln()))
        .unzip();
    if lx.len() < 2 {
        return Ok(SlopeFit {
            steps: steps.to_vec(),
            residuals,
            noise_floor,
            fitted_order: f64::INFINITY,
            exact: true,
        });
    }
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(SlopeFit {
        steps: steps.to_vec(),
        residuals,
        noise_floor,
        fitted_order: sxy / sxx,
        exact: false,
    })
}
