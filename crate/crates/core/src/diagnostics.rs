//! Sample-based evidence for the hypotheses behind the derivative formulas.
//!
//! Constant dimension of an eigenprojection over a continuum cannot be decided
//! from finitely many samples. Everything here is evidence gathered on a grid,
//! and every report records the grid it was gathered on.

use rayon::prelude::*;

use crate::error::{check_finite, check_len, Error, Result};
use crate::linalg::SymMatrix;
use crate::polyfield::PolyMatrixField;
use crate::spectral::{decompose, ClusterConfig, SpectralDecomposition};

/// Bisection steps used to bracket a change in the number of distinct
/// eigenvalues along a grid edge.
pub const BISECTION_STEPS: usize = 40;

/// Safety factor in the projection continuity proxy
/// `‖ΔP‖ ≤ factor · step · L / gap`.
pub const CONTINUITY_FACTOR: f64 = 10.0;

/// Group isolation below this multiple of the clustering threshold makes a
/// scan inconclusive rather than supportive.
pub const AMBIGUOUS_GAP_FACTOR: f64 = 100.0;

/// Integer-valued index functions of one eigenvalue at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    /// `j_*`: smallest repeated index sharing `λ_j`.
    pub j_lo: usize,
    /// `j^*`: largest repeated index sharing `λ_j`.
    pub j_hi: usize,
    /// `d_j`.
    pub d: usize,
    /// `s_j`: distinct eigenvalues `≤ λ_j`.
    pub s_upto_j: usize,
    /// `s_m`: distinct eigenvalues in total.
    pub s_total: usize,
    /// `Σᵢ 1/dᵢ` over repeated indexes; equals `s_total`.
    pub inv_mult_sum: f64,
}

pub fn index_report(decomp: &SpectralDecomposition, j: usize) -> Result<IndexReport> {
    let l = decomp.group_index(j)?;
    let g = &decomp.groups()[l];
    let inv_mult_sum = decomp
        .multiplicities()
        .iter()
        .map(|&d| 1.0 / d as f64)
        .sum::<f64>();
    let report = IndexReport {
        j_lo: g.first,
        j_hi: g.last,
        d: g.multiplicity,
        s_upto_j: l + 1,
        s_total: decomp.s(),
        inv_mult_sum,
    };
    debug_assert!((report.inv_mult_sum - report.s_total as f64).abs() <= 1e-9);
    debug_assert_eq!(report.j_hi + 1 - report.j_lo, report.d);
    Ok(report)
}

/// Index reports of `λ_j` at each of a sequence of points.
pub fn index_reports_along(
    field: &PolyMatrixField,
    points: &[Vec<f64>],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<Vec<IndexReport>> {
    points
        .iter()
        .map(|x| index_report(&decompose(&field.eval(x)?, cfg)?, j))
        .collect()
}

/// Axis-aligned box `[lo₁, hi₁] × … × [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_len("region bounds", lo.len(), hi.len())?;
        check_finite("region bounds", &lo)?;
        check_finite("region bounds", &hi)?;
        if lo.is_empty() {
            return Err(Error::InvalidRegion("region has no axes".into()));
        }
        if let Some(i) = lo.iter().zip(&hi).position(|(a, b)| a > b) {
            return Err(Error::InvalidRegion(format!(
                "axis {}: lower bound {} exceeds upper bound {}",
                i + 1,
                lo[i],
                hi[i]
            )));
        }
        Ok(Region { lo, hi })
    }

    /// Interleaved `lo₁,hi₁,lo₂,hi₂,…`.
    pub fn from_interleaved(bounds: &[f64]) -> Result<Self> {
        if bounds.len() % 2 != 0 {
            return Err(Error::InvalidRegion(
                "box needs an even number of bounds (lo,hi per axis)".into(),
            ));
        }
        let lo = bounds.iter().step_by(2).copied().collect();
        let hi = bounds.iter().skip(1).step_by(2).copied().collect();
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// A grid edge along which the number of distinct eigenvalues changes,
/// with the change bracketed by bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingCandidate {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    /// Endpoints of the bracketing interval after bisection.
    pub bracket: (Vec<f64>, Vec<f64>),
    pub group_counts: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub j: usize,
    pub grid: Vec<usize>,
    pub sample_points: Vec<Vec<f64>>,
    /// Number of distinct eigenvalues `s` at each sample.
    pub group_counts: Vec<usize>,
    /// `d_j` at each sample.
    pub dims_of_j: Vec<usize>,
    /// Distance from `λ_j`'s group to the nearest other eigenvalue, per sample.
    pub gaps: Vec<f64>,
    pub crossings: Vec<CrossingCandidate>,
    pub constant_dim: bool,
    pub constant_s: bool,
    pub min_gap: f64,
    pub cluster_gap_used: f64,
}

struct Sample {
    decomp: SpectralDecomposition,
    group: usize,
    lipschitz: f64,
}

fn grid_points(region: &Region, grid: &[usize]) -> Result<Vec<Vec<f64>>> {
    check_len("grid counts", region.dim(), grid.len())?;
    if let Some(&c) = grid.iter().find(|&&c| c < 2) {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 samples per axis, got {c}"
        )));
    }
    let axes: Vec<Vec<f64>> = (0..region.dim())
        .map(|i| {
            let (a, b, c) = (region.lo[i], region.hi[i], grid[i]);
            (0..c)
                .map(|k| a + (b - a) * k as f64 / (c - 1) as f64)
                .collect()
        })
        .collect();
    let total: usize = grid.iter().product();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut p = vec![0.0; grid.len()];
        for i in (0..grid.len()).rev() {
            p[i] = axes[i][rem % grid[i]];
            rem /= grid[i];
        }
        points.push(p);
    }
    Ok(points)
}

/// `(flat index, neighbour flat index)` for every grid edge, last axis fastest.
fn grid_edges(grid: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = grid.iter().product();
    let mut strides = vec![1; grid.len()];
    for i in (0..grid.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * grid[i + 1];
    }
    let mut edges = Vec::new();
    for flat in 0..total {
        for (i, &stride) in strides.iter().enumerate() {
            if (flat / stride) % grid[i] + 1 < grid[i] {
                edges.push((flat, flat + stride));
            }
        }
    }
    edges
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn group_count(field: &PolyMatrixField, x: &[f64], cfg: &ClusterConfig) -> Result<usize> {
    Ok(decompose(&field.eval(x)?, cfg)?.s())
}

fn bracket_crossing(
    field: &PolyMatrixField,
    a: &[f64],
    b: &[f64],
    count_a: usize,
    cfg: &ClusterConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if group_count(field, &lerp(a, b, mid), cfg)? == count_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lerp(a, b, lo), lerp(a, b, hi)))
}

fn sample_all(
    field: &PolyMatrixField,
    points: &[Vec<f64>],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<Vec<Sample>> {
    points
        .par_iter()
        .map(|x| {
            let jet = field.jet(x)?;
            let decomp = decompose(jet.value(), cfg)?;
            let group = decomp.group_index(j)?;
            // ‖D_e H‖ ≤ sqrt(Σᵢ ‖∂ᵢH‖²) for unit e
            let lipschitz = (0..field.n())
                .map(|i| jet.partial(i).norm_squared())
                .sum::<f64>()
                .sqrt();
            Ok(Sample {
                decomp,
                group,
                lipschitz,
            })
        })
        .collect()
}

fn scan_with_samples(
    field: &PolyMatrixField,
    region: &Region,
    grid: &[usize],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<(ScanReport, Vec<Sample>)> {
    check_len("region dimension", field.n(), region.dim())?;
    if !(1..=field.m()).contains(&j) {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: field.m(),
        });
    }
    let points = grid_points(region, grid)?;
    let samples = sample_all(field, &points, j, cfg)?;

    let group_counts: Vec<usize> = samples.iter().map(|s| s.decomp.s()).collect();
    let dims_of_j: Vec<usize> = samples
        .iter()
        .map(|s| s.decomp.groups()[s.group].multiplicity)
        .collect();
    let gaps: Vec<f64> = samples.iter().map(|s| s.decomp.isolation(s.group)).collect();

    let mut crossings = Vec::new();
    for (a, b) in grid_edges(grid) {
        let (ca, cb) = (group_counts[a], group_counts[b]);
        if ca != cb {
            let bracket = bracket_crossing(field, &points[a], &points[b], ca, cfg)?;
            crossings.push(CrossingCandidate {
                from: points[a].clone(),
                to: points[b].clone(),
                bracket,
                group_counts: (ca, cb),
            });
        }
    }

    let report = ScanReport {
        j,
        grid: grid.to_vec(),
        constant_dim: dims_of_j.windows(2).all(|w| w[0] == w[1]),
        constant_s: group_counts.windows(2).all(|w| w[0] == w[1]),
        min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        cluster_gap_used: samples
            .iter()
            .map(|s| s.decomp.cluster_gap_used())
            .fold(0.0, f64::max),
        sample_points: points,
        group_counts,
        dims_of_j,
        gaps,
        crossings,
    };
    Ok((report, samples))
}

/// Decomposes the field on a grid over `region` and reports whether `d_j`
/// stays constant, the smallest spectral gap around `λ_j`, and bracketed
/// changes in the number of distinct eigenvalues along grid edges.
pub fn scan_constant_dimension(
    field: &PolyMatrixField,
    region: &Region,
    grid: &[usize],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<ScanReport> {
    Ok(scan_with_samples(field, region, grid, j, cfg)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Supported,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Supported => "supported",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Evidence for "`P_j` is continuous / has constant dimension" on a region.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub scan: ScanReport,
    /// Largest `‖P_j(b) − P_j(a)‖` over grid edges with equal `d_j` at both ends.
    pub max_projection_jump: f64,
    /// Edges whose projection jump exceeds the continuity proxy.
    pub flagged_edges: usize,
    pub verdict: Verdict,
    pub witness: Option<Vec<f64>>,
    pub reason: String,
}

/// Gathers evidence for the equivalent conditions "`λ_j` differentiable with
/// constant `d_j`" and "`P_j` continuous" over a region, plus constancy of
/// the number of distinct eigenvalues.
pub fn check_equivalence_conditions(
    field: &PolyMatrixField,
    region: &Region,
    grid: &[usize],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<EquivalenceReport> {
    let (scan, samples) = scan_with_samples(field, region, grid, j, cfg)?;
    let points = &scan.sample_points;

    let mut max_jump = 0.0_f64;
    let mut flagged = 0;
    let mut worst: Option<(f64, usize, usize)> = None;
    for (a, b) in grid_edges(grid) {
        let (sa, sb) = (&samples[a], &samples[b]);
        if scan.dims_of_j[a] != scan.dims_of_j[b] {
            continue;
        }
        let pa: &SymMatrix = &sa.decomp.groups()[sa.group].projection;
        let pb: &SymMatrix = &sb.decomp.groups()[sb.group].projection;
        let jump = (pb.as_matrix() - pa.as_matrix()).norm();
        max_jump = max_jump.max(jump);
        let gap = scan.gaps[a].min(scan.gaps[b]);
        let lipschitz = sa.lipschitz.max(sb.lipschitz);
        let allowed = CONTINUITY_FACTOR * distance(&points[a], &points[b]) * lipschitz / gap;
        if jump > allowed {
            flagged += 1;
            let excess = jump - allowed;
            if worst.is_none_or(|(w, _, _)| excess > w) {
                worst = Some((excess, a, b));
            }
        }
    }

    let distinct_samples = !region.is_degenerate();
    let (verdict, witness, reason) = if !distinct_samples {
        (
            Verdict::Inconclusive,
            None,
            "region is a single point; no neighbouring samples to compare".to_string(),
        )
    } else if !scan.constant_dim {
        let max_d = *scan.dims_of_j.iter().max().expect("non-empty grid");
        let at = scan
            .dims_of_j
            .iter()
            .position(|&d| d == max_d)
            .expect("max exists");
        (
            Verdict::Refuted,
            Some(points[at].clone()),
            format!("d_{j} is not constant: jumps to {max_d} at the witness"),
        )
    } else if let Some((_, a, b)) = worst {
        (
            Verdict::Refuted,
            Some(lerp(&points[a], &points[b], 0.5)),
            format!("P_{j} jumps faster than the continuity proxy on {flagged} grid edge(s)"),
        )
    } else if scan.min_gap < AMBIGUOUS_GAP_FACTOR * scan.cluster_gap_used {
        let at = scan
            .gaps
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        (
            Verdict::Inconclusive,
            Some(points[at].clone()),
            "spectral gap around the eigenvalue is close to the clustering threshold".to_string(),
        )
    } else {
        (
            Verdict::Supported,
            None,
            format!(
                "d_{j} constant and P_{j} within the continuity proxy on all {} samples",
                points.len()
            ),
        )
    };

    Ok(EquivalenceReport {
        scan,
        max_projection_jump: max_jump,
        flagged_edges: flagged,
        verdict,
        witness,
        reason,
    })
}
