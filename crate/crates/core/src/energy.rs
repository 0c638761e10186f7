//! Empirical energy distances and the slice decomposition.
//!
//! For point sets `P`, `Q` write `m(P, Q)` for the mean Euclidean distance
//! over all `|P| |Q|` pairs (diagonal included when `P = Q`). The energy
//! distance of `P` to a target represented by the reference sample `Y` is
//!
//! ```text
//! E(F, F_P) = 2 m(P, Y) - m(P, P) - m(Y, Y)
//! ```
//!
//! and the same expression with an arbitrary second point set gives the
//! distance between two empirical distributions.

use alloc::vec;
use alloc::vec::Vec;

use crate::points::distance;
use crate::sum::Accumulator;
use crate::{Error, PointSet, Result, SlicedDesign};

fn require_nonempty(p: &PointSet) -> Result<()> {
    if p.is_empty() {
        Err(Error::EmptyPointSet)
    } else {
        Ok(())
    }
}

/// Sum of `||p_i - q_j||` over all pairs.
pub fn sum_cross_distance(p: &PointSet, q: &PointSet) -> Result<f64> {
    p.check_dim(q)?;
    let mut acc = Accumulator::new();
    for a in p {
        for b in q {
            acc.add(distance(a, b));
        }
    }
    Ok(acc.value())
}

/// `sum_{i,j} ||p_i - p_j||` over ordered pairs, computed from the upper
/// triangle.
pub fn sum_self_distance(p: &PointSet) -> f64 {
    let mut acc = Accumulator::new();
    for i in 0..p.len() {
        let a = p.row(i);
        for j in i + 1..p.len() {
            acc.add(distance(a, p.row(j)));
        }
    }
    2.0 * acc.value()
}

/// Mean distance over all `|P| |Q|` pairs.
pub fn mean_cross_distance(p: &PointSet, q: &PointSet) -> Result<f64> {
    require_nonempty(p)?;
    require_nonempty(q)?;
    Ok(sum_cross_distance(p, q)? / (p.len() as f64 * q.len() as f64))
}

/// Mean over all ordered pairs, diagonal included; `NaN` for an empty set.
pub fn mean_self_distance(p: &PointSet) -> f64 {
    let n = p.len() as f64;
    sum_self_distance(p) / (n * n)
}

/// Monte-Carlo stand-in for the target distribution, with its mean pairwise
/// distance (the `E||Y - Y'||` estimate) computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSample {
    points: PointSet,
    self_energy: f64,
}

impl ReferenceSample {
    pub fn new(points: PointSet) -> Result<Self> {
        require_nonempty(&points)?;
        let self_energy = mean_self_distance(&points);
        Ok(Self {
            points,
            self_energy,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(1/N^2) sum_{i,j} ||y_i - y_j||`.
    pub fn self_energy(&self) -> f64 {
        self.self_energy
    }
}

/// Energy distance between the empirical distribution of `p` and the target.
pub fn energy_distance(p: &PointSet, reference: &ReferenceSample) -> Result<f64> {
    require_nonempty(p)?;
    let cross = mean_cross_distance(p, reference.points())?;
    Ok(2.0 * cross - mean_self_distance(p) - reference.self_energy())
}

/// Energy distance between two empirical distributions.
pub fn energy_distance_between(p: &PointSet, q: &PointSet) -> Result<f64> {
    let cross = mean_cross_distance(p, q)?;
    Ok(2.0 * cross - mean_self_distance(p) - mean_self_distance(q))
}

/// Every term of the slice decomposition of the full-design energy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecompositionReport {
    pub full_energy: f64,
    pub per_slice_energies: Vec<f64>,
    /// Row-major `K x K`, symmetric, zero diagonal.
    pub cross_energies: Vec<f64>,
    pub reconstructed_full: f64,
    pub residual: f64,
    pub sizes: Vec<usize>,
}

impl DecompositionReport {
    pub fn num_slices(&self) -> usize {
        self.per_slice_energies.len()
    }

    pub fn cross(&self, a: usize, b: usize) -> f64 {
        self.cross_energies[a * self.num_slices() + b]
    }

    /// The three-term two-slice form; `None` unless `K = 2`.
    pub fn two_slice_form(&self) -> Option<f64> {
        if self.num_slices() != 2 {
            return None;
        }
        let n1 = self.sizes[0] as f64;
        let n2 = self.sizes[1] as f64;
        let n = n1 + n2;
        Some(
            n1 / n * self.per_slice_energies[0] + n2 / n * self.per_slice_energies[1]
                - n1 * n2 / (n * n) * self.cross(0, 1),
        )
    }
}

/// Full-design energy plus the slice-level terms it decomposes into:
/// `E(F, F_P) = sum_k (n_k/n) E_k - sum_{k1<k2} (n_k1 n_k2 / n^2) E_{k1 k2}`.
pub fn decompose(design: &SlicedDesign, reference: &ReferenceSample) -> Result<DecompositionReport> {
    design.require_nonempty_slices()?;
    let k = design.num_slices();
    let n = design.len() as f64;
    let slices = design.slices();
    let full_energy = energy_distance(design.points(), reference)?;

    let mut self_means = Vec::with_capacity(k);
    let mut per_slice = Vec::with_capacity(k);
    for s in &slices {
        self_means.push(mean_self_distance(s));
        per_slice.push(energy_distance(s, reference)?);
    }
    let mut cross = vec![0.0; k * k];
    for a in 0..k {
        for b in a + 1..k {
            let e = 2.0 * mean_cross_distance(&slices[a], &slices[b])? - self_means[a] - self_means[b];
            cross[a * k + b] = e;
            cross[b * k + a] = e;
        }
    }

    let mut acc = Accumulator::new();
    for a in 0..k {
        acc.add(design.sizes()[a] as f64 / n * per_slice[a]);
    }
    for a in 0..k {
        for b in a + 1..k {
            let w = design.sizes()[a] as f64 * design.sizes()[b] as f64 / (n * n);
            acc.add(-w * cross[a * k + b]);
        }
    }
    let reconstructed_full = acc.value();
    Ok(DecompositionReport {
        full_energy,
        per_slice_energies: per_slice,
        cross_energies: cross,
        reconstructed_full,
        residual: (full_energy - reconstructed_full).abs(),
        sizes: design.sizes().to_vec(),
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "lambda must lie in [0, 1], found {lambda}"
        )))
    }
}

/// Hybrid criterion `lambda E(F, F_P) + (1 - lambda) sum_k (n_k/n) E(F, F_Pk)`.
pub fn hybrid_energy(design: &SlicedDesign, reference: &ReferenceSample, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    design.require_nonempty_slices()?;
    let n = design.len() as f64;
    let full = energy_distance(design.points(), reference)?;
    let mut weighted = Accumulator::new();
    for (k, s) in design.slices().iter().enumerate() {
        weighted.add(design.sizes()[k] as f64 / n * energy_distance(s, reference)?);
    }
    Ok(lambda * full + (1.0 - lambda) * weighted.value())
}

/// The hybrid criterion written through slice terms only:
/// `sum_k (n_k/n) E_k - lambda sum_{k1,k2} (n_k1 n_k2 / 2n^2) E_{k1 k2}`.
pub fn hybrid_energy_from_slices(
    design: &SlicedDesign,
    reference: &ReferenceSample,
    lambda: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    let report = decompose(design, reference)?;
    let k = report.num_slices();
    let n = design.len() as f64;
    let mut acc = Accumulator::new();
    for a in 0..k {
        acc.add(report.sizes[a] as f64 / n * report.per_slice_energies[a]);
    }
    for a in 0..k {
        for b in 0..k {
            let w = report.sizes[a] as f64 * report.sizes[b] as f64 / (2.0 * n * n);
            acc.add(-lambda * w * report.cross(a, b));
        }
    }
    Ok(acc.value())
}

/// Monte-Carlo objective minimized by the one-shot solver: the hybrid
/// criterion without the constant `E||Y - Y'||`, so that
/// `objective_h = hybrid_energy + reference.self_energy()`.
pub fn objective_h(design: &SlicedDesign, reference: &PointSet, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    design.require_nonempty_slices()?;
    require_nonempty(reference)?;
    design.points().check_dim(reference)?;
    let n = design.len() as f64;
    let big_n = reference.len() as f64;
    let pts = design.points();
    let labels = design.labels();
    let sizes = design.sizes();

    let attraction = sum_cross_distance(pts, reference)? * 2.0 / (n * big_n);

    // within-slice pairs carry (1-l)/(n n_k) + l/n^2, cross-slice pairs l/n^2
    let mut repulsion = Accumulator::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = distance(pts.row(i), pts.row(j));
            let w = if labels[i] == labels[j] {
                (1.0 - lambda) / (n * sizes[labels[i]] as f64) + lambda / (n * n)
            } else {
                lambda / (n * n)
            };
            repulsion.add(2.0 * w * d);
        }
    }
    Ok(attraction - repulsion.value())
}

/// Objective of one sequential stage: subset `pk` is optimized while the
/// already accumulated set `pc` stays fixed.
///
/// ```text
/// h_s = 2/(n_k N) sum_i sum_m ||x_i - y_m||
///     - (1 - l n_c/(n_c + n_k)) / n_k^2 sum_{i,j in P_k} ||x_i - x_j||
///     - 2 l / ((n_c + n_k) n_k) sum_{i in P_k} sum_{j in P_c} ||x_i - x_j||
/// ```
pub fn objective_h_seq(
    pk: &PointSet,
    pc: &PointSet,
    reference: &PointSet,
    lambda_k: f64,
) -> Result<f64> {
    check_lambda(lambda_k)?;
    require_nonempty(pk)?;
    require_nonempty(reference)?;
    pk.check_dim(reference)?;
    pk.check_dim(pc)?;
    let nk = pk.len() as f64;
    let nc = pc.len() as f64;
    let big_n = reference.len() as f64;
    let share = if pc.is_empty() {
        0.0
    } else {
        lambda_k * nc / (nc + nk)
    };
    let attraction = 2.0 / (nk * big_n) * sum_cross_distance(pk, reference)?;
    let within = (1.0 - share) / (nk * nk) * sum_self_distance(pk);
    let cross = if pc.is_empty() {
        0.0
    } else {
        2.0 * lambda_k / ((nc + nk) * nk) * sum_cross_distance(pk, pc)?
    };
    Ok(attraction - within - cross)
}
