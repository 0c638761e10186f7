//! Uniformity criteria for sliced designs.
//!
//! Every criterion is the full-design term plus the sum of the slice terms.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::points::{distance, squared_distance};
use crate::region::{Region, RegionKind};
use crate::sum::{Accumulator, VecAccumulator};
use crate::{Error, PointSet, Result, SlicedDesign};

/// Smallest Monte-Carlo sample accepted for moment estimation.
pub const MIN_MONTE_CARLO: usize = 10_000;
pub const DEFAULT_EVAL_SIZE: usize = 10_000;
pub const DEFAULT_MONTE_CARLO: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MomentMode {
    Analytic,
    MonteCarlo(usize),
}

/// Target mean and per-coordinate standard deviation of the uniform
/// distribution on a region.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentSpec {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub source: MomentMode,
}

/// Analytic moments on the standard simplex, sample moments of a fresh
/// uniform sample otherwise.
pub fn true_moments<R: Rng + ?Sized>(
    region: &Region,
    mode: MomentMode,
    rng: &mut R,
) -> Result<MomentSpec> {
    let p = region.dim();
    match mode {
        MomentMode::Analytic => {
            if !matches!(region.kind(), RegionKind::StandardSimplex) {
                return Err(Error::AnalyticMomentsUnavailable);
            }
            let pf = p as f64;
            let sd = libm::sqrt((pf - 1.0) / (pf * pf * (pf + 1.0)));
            Ok(MomentSpec {
                mu: vec![1.0 / pf; p],
                sigma: vec![sd; p],
                source: mode,
            })
        }
        MomentMode::MonteCarlo(n) => {
            if n < MIN_MONTE_CARLO {
                return Err(Error::InvalidArgument(format!(
                    "Monte-Carlo moments need at least {MIN_MONTE_CARLO} samples, got {n}"
                )));
            }
            let sample = region.sample_uniform(n, rng)?;
            Ok(MomentSpec {
                mu: mean(&sample),
                sigma: std_dev(&sample),
                source: mode,
            })
        }
    }
}

/// Analytic moments where available, `MonteCarlo(DEFAULT_MONTE_CARLO)` otherwise.
pub fn default_moments<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> Result<MomentSpec> {
    match region.kind() {
        RegionKind::StandardSimplex => true_moments(region, MomentMode::Analytic, rng),
        _ => true_moments(region, MomentMode::MonteCarlo(DEFAULT_MONTE_CARLO), rng),
    }
}

/// Componentwise mean.
pub fn mean(points: &PointSet) -> Vec<f64> {
    let mut acc = VecAccumulator::new(points.dim());
    for x in points {
        acc.add_scaled(x, 1.0);
    }
    let n = points.len() as f64;
    acc.values().into_iter().map(|v| v / n).collect()
}

/// Componentwise sample standard deviation (divisor `n - 1`); zero for a
/// single point.
pub fn std_dev(points: &PointSet) -> Vec<f64> {
    let n = points.len();
    let mu = mean(points);
    if n < 2 {
        return vec![0.0; points.dim()];
    }
    (0..points.dim())
        .map(|j| {
            let ss: f64 = crate::sum::sum(points.iter().map(|x| (x[j] - mu[j]) * (x[j] - mu[j])));
            libm::sqrt(ss / (n - 1) as f64)
        })
        .collect()
}


/// Minimum distance over pairs of distinct indices; `None` below two points.
pub fn min_pairwise_distance(points: &PointSet) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(distance(points.row(i), points.row(j)));
        }
    }
    Some(best)
}

/// Criteria of one point set (the full design or a slice).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SliceTerms {
    pub delta_mu: f64,
    pub delta_sigma: f64,
    pub rmsd: f64,
    pub mad: f64,
    /// Absent below two points.
    pub mid: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    DeltaMu,
    DeltaSigma,
    Rmsd,
    Mad,
    Mid,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::DeltaMu,
        Metric::DeltaSigma,
        Metric::Rmsd,
        Metric::Mad,
        Metric::Mid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DeltaMu => "delta_mu",
            Metric::DeltaSigma => "delta_sigma",
            Metric::Rmsd => "rmsd",
            Metric::Mad => "mad",
            Metric::Mid => "mid",
        }
    }
}

impl core::fmt::Display for Metric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub delta_mu: f64,
    pub delta_sigma: f64,
    pub rmsd: f64,
    pub mad: f64,
    /// Sum of the defined MiD terms.
    pub mid: f64,
    pub full: SliceTerms,
    pub slices: Vec<SliceTerms>,
    pub n: usize,
    pub k: usize,
    pub n_eval: usize,
    pub flags: Vec<String>,
}

impl MetricsReport {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::DeltaMu => self.delta_mu,
            Metric::DeltaSigma => self.delta_sigma,
            Metric::Rmsd => self.rmsd,
            Metric::Mad => self.mad,
            Metric::Mid => self.mid,
        }
    }
}

/// Evaluates the five criteria of `design` against the evaluation sample
/// `eval` and target moments.
pub fn evaluate(
    design: &SlicedDesign,
    eval: &PointSet,
    moments: &MomentSpec,
) -> Result<MetricsReport> {
    if design.is_empty() || eval.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    design.require_nonempty_slices()?;
    design.points().check_dim(eval)?;
    let p = design.dim();
    if moments.mu.len() != p || moments.sigma.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: moments.mu.len(),
        });
    }
    let k = design.num_slices();
    let pts = design.points();
    let labels = design.labels();

    // nearest-design distances, full set and per slice, in one scan
    let mut full_sq = Accumulator::new();
    let mut full_max: f64 = 0.0;
    let mut slice_sq = vec![Accumulator::new(); k];
    let mut slice_max = vec![0.0f64; k];
    let mut nearest = vec![f64::INFINITY; k];
    for u in eval {
        nearest.iter_mut().for_each(|v| *v = f64::INFINITY);
        for (i, x) in pts.iter().enumerate() {
            let d = squared_distance(u, x);
            let s = &mut nearest[labels[i]];
            if d < *s {
                *s = d;
            }
        }
        let best = nearest.iter().copied().fold(f64::INFINITY, f64::min);
        full_sq.add(best);
        full_max = full_max.max(best);
        for s in 0..k {
            slice_sq[s].add(nearest[s]);
            slice_max[s] = slice_max[s].max(nearest[s]);
        }
    }
    let m = eval.len() as f64;
    let terms = |set: &PointSet, sq: f64, max_sq: f64| SliceTerms {
        delta_mu: distance(&mean(set), &moments.mu),
        delta_sigma: distance(&std_dev(set), &moments.sigma),
        rmsd: libm::sqrt(sq / m),
        mad: libm::sqrt(max_sq),
        mid: min_pairwise_distance(set),
    };
    let full = terms(pts, full_sq.value(), full_max);
    let slices: Vec<SliceTerms> = design
        .slices()
        .iter()
        .enumerate()
        .map(|(s, set)| terms(set, slice_sq[s].value(), slice_max[s]))
        .collect();

    let mut flags = Vec::new();
    if full.mid.is_none() {
        flags.push(String::from("mid_undefined:full"));
    }
    for (s, t) in slices.iter().enumerate() {
        if t.mid.is_none() {
            flags.push(format!("mid_undefined:slice_{}", s + 1));
        }
    }
    let total = |f: fn(&SliceTerms) -> f64| {
        let mut acc = Accumulator::new();
        acc.add(f(&full));
        for t in &slices {
            acc.add(f(t));
        }
        acc.value()
    };
    Ok(MetricsReport {
        delta_mu: total(|t| t.delta_mu),
        delta_sigma: total(|t| t.delta_sigma),
        rmsd: total(|t| t.rmsd),
        mad: total(|t| t.mad),
        mid: total(|t| t.mid.unwrap_or(0.0)),
        full,
        slices,
        n: design.len(),
        k,
        n_eval: eval.len(),
        flags,
    })
}

/// Type-7 sample quantile (linear interpolation between order statistics).
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Median and interquartile range of replicate values.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    let q1 = quantile(values, 0.25)?;
    let q3 = quantile(values, 0.75)?;
    Some(Summary {
        median: quantile(values, 0.5)?,
        q1,
        q3,
        iqr: q3 - q1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub metric: Metric,
    pub summary: Summary,
    pub values: Vec<f64>,
}

/// Evaluates every labeled design on `replicates` fresh evaluation samples of
/// size `n_eval` and summarizes each design × metric.
pub fn compare<R: Rng + ?Sized>(
    designs: &[(String, SlicedDesign)],
    region: &Region,
    moments: &MomentSpec,
    replicates: usize,
    n_eval: usize,
    rng: &mut R,
) -> Result<Vec<SummaryRow>> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("at least one replicate is required".into()));
    }
    let mut values = vec![vec![Vec::with_capacity(replicates); Metric::ALL.len()]; designs.len()];
    for _ in 0..replicates {
        let eval = region.sample_uniform(n_eval, rng)?;
        for (d, (_, design)) in designs.iter().enumerate() {
            let report = evaluate(design, &eval, moments)?;
            for (m, metric) in Metric::ALL.iter().enumerate() {
                values[d][m].push(report.value(*metric));
            }
        }
    }
    let mut rows = Vec::new();
    for (d, (label, _)) in designs.iter().enumerate() {
        for (m, metric) in Metric::ALL.iter().enumerate() {
            let v = core::mem::take(&mut values[d][m]);
            rows.push(SummaryRow {
                label: label.clone(),
                metric: *metric,
                summary: summarize(&v).expect("replicates >= 1"),
                values: v,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn analytic_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = true_moments(&Region::simplex(3).unwrap(), MomentMode::Analytic, &mut rng).unwrap();
        assert!((m.sigma[0] - 0.23570226).abs() < 1e-8);
        let m = true_moments(&Region::simplex(2).unwrap(), MomentMode::Analytic, &mut rng).unwrap();
        assert!((m.sigma[1] - 0.28867513).abs() < 1e-8);
        let b = Region::bounded(vec![0.1, 0.05, 0.15], vec![0.8, 0.6, 0.7]).unwrap();
        assert_eq!(
            true_moments(&b, MomentMode::Analytic, &mut rng),
            Err(Error::AnalyticMomentsUnavailable)
        );
        assert!(true_moments(&b, MomentMode::MonteCarlo(100), &mut rng).is_err());
        let mc = true_moments(&b, MomentMode::MonteCarlo(100_000), &mut rng).unwrap();
        assert!(b.contains(&mc.mu, 1e-12).unwrap());
    }

    #[test]
    fn monte_carlo_matches_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = Region::simplex(3).unwrap();
        let a = true_moments(&r, MomentMode::Analytic, &mut rng).unwrap();
        let m = true_moments(&r, MomentMode::MonteCarlo(200_000), &mut rng).unwrap();
        for j in 0..3 {
            assert!((a.mu[j] - m.mu[j]).abs() < 3e-3);
            assert!((a.sigma[j] - m.sigma[j]).abs() < 3e-3);
        }
    }

    fn analytic3() -> MomentSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        true_moments(&Region::simplex(3).unwrap(), MomentMode::Analytic, &mut rng).unwrap()
    }

    #[test]
    fn single_centroid_point() {
        let d = SlicedDesign::unsliced(PointSet::from_rows(3, &[[1.0 / 3.0; 3]]).unwrap());
        let eval = PointSet::from_rows(3, &[[1.0, 0.0, 0.0]]).unwrap();
        let r = evaluate(&d, &eval, &analytic3()).unwrap();
        assert!(r.delta_mu.abs() < 1e-15);
        assert_eq!(r.full.mid, None);
        assert_eq!(r.mid, 0.0);
        assert_eq!(r.flags.len(), 2);
    }

    #[test]
    fn design_covering_eval_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eval = Region::simplex(3).unwrap().sample_uniform(50, &mut rng).unwrap();
        let r = evaluate(&SlicedDesign::unsliced(eval.clone()), &eval, &analytic3()).unwrap();
        assert_eq!(r.rmsd, 0.0);
        assert_eq!(r.mad, 0.0);
    }

    #[test]
    fn two_vertex_mid() {
        let d = SlicedDesign::unsliced(
            PointSet::from_rows(3, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap(),
        );
        let eval = PointSet::from_rows(3, &[[0.0, 0.0, 1.0]]).unwrap();
        let r = evaluate(&d, &eval, &analytic3()).unwrap();
        assert!((r.mid - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&[7.0], 0.75), Some(7.0));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn compare_single_replicate_equals_evaluate() {
        let r = Region::simplex(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = SlicedDesign::unsliced(r.sample_uniform(10, &mut rng).unwrap());
        let moments = analytic3();
        let rows = compare(&[("a".into(), d.clone())], &r, &moments, 1, 500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let eval = r.sample_uniform(500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let report = evaluate(&d, &eval, &moments).unwrap();
        for row in &rows {
            assert_eq!(row.summary.median, report.value(row.metric));
            assert_eq!(row.summary.iqr, 0.0);
        }
        assert!(compare(&[("a".into(), d)], &r, &moments, 0, 10, &mut rng).is_err());
    }
}
