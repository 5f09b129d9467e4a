use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

use super::jacobi::{eig_sym, Spectrum};

pub const DEFAULT_RELATIVE_GAP: f64 = 1e-8;

/// Distinct eigenvalues closer than this fraction of `‖X‖` make the
/// product formula for the covariants numerically meaningless.
pub const FROBENIUS_GAP_TOL: f64 = 1e-14;

/// How sorted eigenvalues are merged into groups of equal eigenvalues.
///
/// Consecutive eigenvalues are merged when their gap is at most
/// `relative_gap · max(1, ‖X‖)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    pub relative_gap: f64,
}

impl ClusterConfig {
    pub fn new(relative_gap: f64) -> Result<Self> {
        if relative_gap > 0.0 && relative_gap.is_finite() {
            Ok(ClusterConfig { relative_gap })
        } else {
            Err(Error::InvalidArgument(format!(
                "relative gap must be positive and finite, got {relative_gap}"
            )))
        }
    }

    pub fn threshold(&self, x: &SymMatrix) -> f64 {
        self.relative_gap * x.norm().max(1.0)
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            relative_gap: DEFAULT_RELATIVE_GAP,
        }
    }
}

/// One distinct eigenvalue with its eigenprojection.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    /// Mean of the clustered eigenvalues.
    pub value: f64,
    pub multiplicity: usize,
    pub projection: SymMatrix,
    /// Orthonormal basis of the eigenspace (`m×d`), `projection = basis·basisᵀ`.
    pub basis: Matrix,
    /// First repeated index `j_*` of the group (1-based).
    pub first: usize,
    /// Last repeated index `j^*` of the group (1-based).
    pub last: usize,
}

impl EigenGroup {
    pub fn contains(&self, j: usize) -> bool {
        (self.first..=self.last).contains(&j)
    }
}

/// `X = Σ_l λ_{α(l)} P_{α(l)}` over the distinct eigenvalues of `X`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    matrix: SymMatrix,
    spectrum: Spectrum,
    groups: Vec<EigenGroup>,
    cluster_gap_used: f64,
    nearest_gap_margin: f64,
}

/// Clusters the spectrum of `x` into distinct eigenvalues and builds their
/// eigenprojections.
pub fn decompose(x: &SymMatrix, cfg: &ClusterConfig) -> Result<SpectralDecomposition> {
    let spectrum = eig_sym(x)?;
    let m = x.dim();
    let threshold = cfg.threshold(x);

    let mut groups = Vec::new();
    let mut margin = f64::INFINITY;
    let mut start = 0;
    for i in 0..m {
        let closes = if i + 1 < m {
            let gap = spectrum.values[i + 1] - spectrum.values[i];
            margin = margin.min((gap - threshold).abs());
            gap > threshold
        } else {
            true
        };
        if closes {
            groups.push(build_group(&spectrum, start, i + 1));
            start = i + 1;
        }
    }

    Ok(SpectralDecomposition {
        matrix: x.clone(),
        spectrum,
        groups,
        cluster_gap_used: threshold,
        nearest_gap_margin: margin,
    })
}

fn build_group(spectrum: &Spectrum, start: usize, end: usize) -> EigenGroup {
    let d = end - start;
    let basis = spectrum.vectors.columns(start, d).clone_owned();
    let projection = SymMatrix::symmetrize(&basis * basis.transpose());
    let value = spectrum.values[start..end].iter().sum::<f64>() / d as f64;
    EigenGroup {
        value,
        multiplicity: d,
        projection,
        basis,
        first: start + 1,
        last: end,
    }
}

impl SpectralDecomposition {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn m(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Repeated eigenvalues `λ₁ ≤ … ≤ λ_m` as computed, before clustering.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    /// Number of distinct eigenvalues `s`.
    pub fn s(&self) -> usize {
        self.groups.len()
    }

    /// Absolute merge threshold that produced this clustering.
    pub fn cluster_gap_used(&self) -> f64 {
        self.cluster_gap_used
    }

    /// Smallest distance between any consecutive eigenvalue gap and the
    /// merge threshold; small values mean the clustering was a close call.
    pub fn nearest_gap_margin(&self) -> f64 {
        self.nearest_gap_margin
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if (1..=self.m()).contains(&j) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: j,
                max: self.m(),
            })
        }
    }

    /// Position in `groups()` of the group holding repeated index `j`.
    pub fn group_index(&self, j: usize) -> Result<usize> {
        self.check_index(j)?;
        Ok(self
            .groups
            .iter()
            .position(|g| g.contains(j))
            .expect("groups cover 1..=m"))
    }

    pub fn group_of(&self, j: usize) -> Result<&EigenGroup> {
        Ok(&self.groups[self.group_index(j)?])
    }

    /// Distance from group `l` to the nearest other distinct eigenvalue
    /// (infinite when `s = 1`).
    pub fn isolation(&self, l: usize) -> f64 {
        let v = self.groups[l].value;
        let below = l
            .checked_sub(1)
            .map_or(f64::INFINITY, |k| v - self.groups[k].value);
        let above = self
            .groups
            .get(l + 1)
            .map_or(f64::INFINITY, |g| g.value - v);
        below.min(above)
    }

    /// Smallest distance between consecutive distinct eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.groups
            .windows(2)
            .map(|w| w[1].value - w[0].value)
            .fold(f64::INFINITY, f64::min)
    }

    /// `d_i` for every repeated index, in order.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.multiplicity, g.multiplicity))
            .collect()
    }
}

/// Frobenius covariants `P_{α(k)} = ∏_{l≠k} (X − λ_{α(l)} I)/(λ_{α(k)} − λ_{α(l)})`,
/// one per distinct eigenvalue, in increasing order.
pub fn frobenius_covariants(decomp: &SpectralDecomposition) -> Result<Vec<SymMatrix>> {
    let x = decomp.matrix();
    let m = x.dim();
    let groups = decomp.groups();
    let floor = FROBENIUS_GAP_TOL * x.norm();
    for w in groups.windows(2) {
        if (w[1].value - w[0].value).abs() <= floor {
            return Err(Error::DegenerateGap {
                a: w[0].value,
                b: w[1].value,
            });
        }
    }
    let id = Matrix::identity(m, m);
    Ok(groups
        .iter()
        .enumerate()
        .map(|(k, gk)| {
            let mut p = id.clone();
            for (l, gl) in groups.iter().enumerate() {
                if l != k {
                    let factor = (x.as_matrix() - &id * gl.value) / (gk.value - gl.value);
                    p = factor * p;
                }
            }
            SymMatrix::symmetrize(p)
        })
        .collect())
}

/// `A_j = Σ_{λ_{α(l)} ≠ λ_j} P_{α(l)}/(λ_j − λ_{α(l)})`, the pseudoinverse of
/// `λ_j I − X`. Zero when `X` has a single distinct eigenvalue.
pub fn pseudoinverse(decomp: &SpectralDecomposition, j: usize) -> Result<SymMatrix> {
    let own = decomp.group_index(j)?;
    let lambda = decomp.groups()[own].value;
    let m = decomp.m();
    let mut a = Matrix::zeros(m, m);
    for (l, g) in decomp.groups().iter().enumerate() {
        if l != own {
            a += g.projection.as_matrix() / (lambda - g.value);
        }
    }
    Ok(SymMatrix::symmetrize(a))
}

/// Sum of the `k` smallest eigenvalues and, when unique, the projection that
/// attains it in `min tr(RX)` over rank-`k` projections.
#[derive(Debug, Clone)]
pub struct KyFanSum {
    pub value: f64,
    /// `Σ_{i ≤ k} P_i/d_i`, present only when `k` ends a group (or `k = 0`),
    /// which is exactly when the minimizer is unique.
    pub minimizer: Option<SymMatrix>,
}

pub fn kyfan_sum(decomp: &SpectralDecomposition, k: usize) -> Result<KyFanSum> {
    let m = decomp.m();
    if k > m {
        return Err(Error::CountOutOfRange { k, max: m });
    }
    let value = decomp.eigenvalues()[..k].iter().sum();
    let minimizer = if k == 0 {
        Some(SymMatrix::zeros(m))
    } else {
        decomp.groups().iter().position(|g| g.last == k).map(|end| {
            let mut r = Matrix::zeros(m, m);
            for g in &decomp.groups()[..=end] {
                r += g.projection.as_matrix();
            }
            SymMatrix::symmetrize(r)
        })
    };
    Ok(KyFanSum { value, minimizer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::builtin;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Matrix, b: &[f64], tol: f64) -> bool {
        let e = Matrix::from_row_slice(a.nrows(), a.ncols(), b);
        (a - e).norm() <= tol
    }

    fn check_invariants(d: &SpectralDecomposition) {
        let m = d.m();
        let id = Matrix::identity(m, m);
        assert_eq!(d.groups().iter().map(|g| g.multiplicity).sum::<usize>(), m);
        let sum_p: Matrix = d.groups().iter().map(|g| g.projection.as_matrix().clone()).sum();
        assert!((sum_p - &id).norm() <= 1e-9);
        let recon: Matrix = d
            .groups()
            .iter()
            .map(|g| g.projection.as_matrix() * g.value)
            .sum();
        assert!((recon - d.matrix().as_matrix()).norm() <= 1e-8 * d.matrix().norm().max(1.0));
        for (l, gl) in d.groups().iter().enumerate() {
            let p = gl.projection.as_matrix();
            assert!((p * p - p).norm() <= 1e-9);
            assert!((p.trace() - gl.multiplicity as f64).abs() <= 1e-9);
            assert_eq!(gl.last - gl.first + 1, gl.multiplicity);
            for gk in &d.groups()[l + 1..] {
                assert!((p * gk.projection.as_matrix()).norm() <= 1e-9);
            }
        }
        assert!(d.groups().windows(2).all(|w| w[0].value < w[1].value));
    }

    #[test]
    fn zero_matrix_is_one_group() {
        let d = decompose(&SymMatrix::zeros(2), &ClusterConfig::default()).unwrap();
        assert_eq!(d.s(), 1);
        let g = &d.groups()[0];
        assert_eq!((g.value, g.multiplicity, g.first, g.last), (0.0, 2, 1, 2));
        assert!(close(g.projection.as_matrix(), &[1.0, 0.0, 0.0, 1.0], 0.0));
        check_invariants(&d);
    }

    #[test]
    fn repeated_diagonal() {
        let d = decompose(&SymMatrix::from_diagonal(&[1.0, 2.0, 2.0]), &ClusterConfig::default())
            .unwrap();
        assert_eq!(d.s(), 2);
        assert_eq!(d.groups()[0].multiplicity, 1);
        assert!(close(d.groups()[0].projection.as_matrix(), &[1., 0., 0., 0., 0., 0., 0., 0., 0.], 1e-15));
        assert_eq!(d.groups()[1].value, 2.0);
        assert_eq!(d.groups()[1].multiplicity, 2);
        assert!(close(d.groups()[1].projection.as_matrix(), &[0., 0., 0., 0., 1., 0., 0., 0., 1.], 1e-15));
        assert_eq!(d.multiplicities(), vec![1, 2, 2]);
        check_invariants(&d);
    }

    #[test]
    fn quartic_at_one_zero() {
        let h = builtin::quartic().eval(&[1.0, 0.0]).unwrap();
        let d = decompose(&h, &ClusterConfig::default()).unwrap();
        assert_eq!(d.s(), 2);
        let (g1, g2) = (&d.groups()[0], &d.groups()[1]);
        assert!((g1.value + 1.0).abs() < 1e-15 && (g2.value - 1.0).abs() < 1e-15);
        assert!(close(g1.projection.as_matrix(), &[0.0, 0.0, 0.0, 1.0], 1e-15));
        assert!(close(g2.projection.as_matrix(), &[1.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn clustering_threshold_and_margin() {
        let x = SymMatrix::from_diagonal(&[1.0, 1.0 + 1e-10, 3.0]);
        let d = decompose(&x, &ClusterConfig::default()).unwrap();
        assert_eq!(d.s(), 2);
        assert!((d.cluster_gap_used() - 1e-8 * x.norm()).abs() < 1e-20);
        let tight = decompose(&x, &ClusterConfig::new(1e-12).unwrap()).unwrap();
        assert_eq!(tight.s(), 3);
        assert!(tight.nearest_gap_margin() < 1e-9);
        assert!(ClusterConfig::new(0.0).is_err());
        assert!(ClusterConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn random_decompositions_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=5 {
            for _ in 0..20 {
                let x = sampling::random_symmetric(m, &mut rng);
                check_invariants(&decompose(&x, &ClusterConfig::default()).unwrap());
            }
            let x = sampling::symmetric_with_spectrum(
                &(0..m).map(|i| (i / 2) as f64).collect::<Vec<_>>(),
                &mut rng,
            );
            let d = decompose(&x, &ClusterConfig::default()).unwrap();
            assert_eq!(d.s(), m.div_ceil(2));
            check_invariants(&d);
        }
    }

    #[test]
    fn frobenius_examples() {
        let d = decompose(&SymMatrix::from_diagonal(&[1.0, 2.0, 2.0]), &ClusterConfig::default())
            .unwrap();
        let cov = frobenius_covariants(&d).unwrap();
        assert!(close(cov[0].as_matrix(), &[1., 0., 0., 0., 0., 0., 0., 0., 0.], 0.0));

        let single = decompose(&SymMatrix::identity(3), &ClusterConfig::default()).unwrap();
        let cov = frobenius_covariants(&single).unwrap();
        assert_eq!(cov.len(), 1);
        assert_eq!(cov[0].as_matrix(), &Matrix::identity(3, 3));
    }

    #[test]
    fn frobenius_matches_projections_when_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let x = sampling::symmetric_with_spectrum(&[-1.0, 0.5, 2.0, 4.0], &mut rng);
            let d = decompose(&x, &ClusterConfig::default()).unwrap();
            for (c, g) in frobenius_covariants(&d).unwrap().iter().zip(d.groups()) {
                assert!((c.as_matrix() - g.projection.as_matrix()).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn frobenius_rejects_degenerate_gap() {
        let x = SymMatrix::from_diagonal(&[1.0, 1.0 + 1e-16 * 4.0, 2.0]);
        let d = decompose(&x, &ClusterConfig::new(1e-30).unwrap()).unwrap();
        if d.s() == 3 {
            assert!(matches!(frobenius_covariants(&d), Err(Error::DegenerateGap { .. })));
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let h = builtin::quartic().eval(&[1.0, 0.0]).unwrap();
        let d = decompose(&h, &ClusterConfig::default()).unwrap();
        let a = pseudoinverse(&d, 2).unwrap();
        assert!(close(a.as_matrix(), &[0.0, 0.0, 0.0, 0.5], 1e-15));

        let d = decompose(&SymMatrix::from_diagonal(&[1.0, 2.0, 2.0]), &ClusterConfig::default())
            .unwrap();
        let a = pseudoinverse(&d, 1).unwrap();
        assert!(close(a.as_matrix(), &[0., 0., 0., 0., -1., 0., 0., 0., -1.], 0.0));

        let d = decompose(&SymMatrix::from_diagonal(&[3.0, 3.0]), &ClusterConfig::default())
            .unwrap();
        assert_eq!(pseudoinverse(&d, 2).unwrap(), SymMatrix::zeros(2));
        assert!(matches!(pseudoinverse(&d, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(pseudoinverse(&d, 0).is_err());
    }

    #[test]
    fn kyfan_examples() {
        let cfg = ClusterConfig::default();
        let d = decompose(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0]), &cfg).unwrap();
        let r = kyfan_sum(&d, 2).unwrap();
        assert_eq!(r.value, 3.0);
        assert!(close(r.minimizer.unwrap().as_matrix(), &[0., 0., 0., 0., 1., 0., 0., 0., 1.], 0.0));

        let d = decompose(&SymMatrix::from_diagonal(&[1.0, 1.0, 2.0]), &cfg).unwrap();
        let r = kyfan_sum(&d, 1).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.minimizer.is_none());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = sampling::random_symmetric(4, &mut rng);
        let d = decompose(&x, &cfg).unwrap();
        let r = kyfan_sum(&d, 4).unwrap();
        assert!((r.value - x.trace()).abs() < 1e-12);
        assert!((r.minimizer.unwrap().as_matrix() - Matrix::identity(4, 4)).norm() < 1e-12);

        let r = kyfan_sum(&d, 0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.minimizer.unwrap(), SymMatrix::zeros(4));
        assert!(matches!(kyfan_sum(&d, 5), Err(Error::CountOutOfRange { k: 5, max: 4 })));
    }
}
