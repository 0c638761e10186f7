//! Splitting a fixed point set into representative slices.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::energy::{mean_cross_distance, mean_self_distance};
use crate::points::distance;
use crate::solver::sequential_targets;
use crate::sum::Accumulator;
use crate::{Error, PointSet, Result, SlicedDesign};

const PROTOTYPE_MAX_ITER: usize = 200;
const PROTOTYPE_TOL: f64 = 1e-8;
const PROTOTYPE_JITTER: f64 = 1e-3;
const REPAIR_BUDGET: usize = 100;
pub const DEFAULT_RESTARTS: usize = 8;

/// How ties between equally near pool points are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub sizes: Vec<usize>,
    /// Slice processing order; ascending sizes (stable) when `None`.
    pub order: Option<Vec<usize>>,
    pub tie_break: TieBreak,
    /// Follow the greedy split with pairwise swap descent.
    pub refine: bool,
    /// Independent starts (alternating prototype splits and random splits,
    /// each refined); the best resulting split is kept.
    pub restarts: usize,
}

impl PartitionPlan {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self {
            sizes,
            order: None,
            tie_break: TieBreak::LowestIndex,
            refine: true,
            restarts: DEFAULT_RESTARTS,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidArgument("at least one slice is required".into()));
        }
        if let Some(k) = self.sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptySlice { slice: k });
        }
        let total: usize = self.sizes.iter().sum();
        if total != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: total,
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("at least one restart is required".into()));
        }
        if let Some(order) = &self.order {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..self.sizes.len()).collect::<Vec<_>>() {
                return Err(Error::InvalidArgument(
                    "processing order must list every slice once".into(),
                ));
            }
        }
        Ok(())
    }

    fn stage_order(&self) -> Vec<usize> {
        self.order.clone().unwrap_or_else(|| {
            let mut order: Vec<usize> = (0..self.sizes.len()).collect();
            order.sort_by_key(|&k| self.sizes[k]);
            order
        })
    }
}

/// Uniformly random assignment of the points to slices of the planned sizes.
pub fn random_partition<R: Rng + ?Sized>(
    points: &PointSet,
    plan: &PartitionPlan,
    rng: &mut R,
) -> Result<SlicedDesign> {
    plan.check(points.len())?;
    let mut labels: Vec<usize> = plan
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| core::iter::repeat_n(k, s))
        .collect();
    labels.shuffle(rng);
    SlicedDesign::new(points.clone(), labels, plan.sizes.len())
}

/// `sum_k n_k/n E(F_P, F_{P_k})` with the full set `P` as the target.
pub fn partition_objective(design: &SlicedDesign) -> Result<f64> {
    design.require_nonempty_slices()?;
    let full = design.points();
    let n = design.len() as f64;
    let full_self = mean_self_distance(full);
    let mut acc = Accumulator::new();
    for (k, slice) in design.slices().iter().enumerate() {
        let e = 2.0 * mean_cross_distance(full, slice)? - full_self - mean_self_distance(slice);
        acc.add(design.sizes()[k] as f64 / n * e);
    }
    Ok(acc.value())
}

/// `sum_{k1,k2} n_k1 n_k2 / (2 n^2) E(F_{P_k1}, F_{P_k2})`, equal to
/// [`partition_objective`].
pub fn partition_objective_pairwise(design: &SlicedDesign) -> Result<f64> {
    design.require_nonempty_slices()?;
    let slices = design.slices();
    let n = design.len() as f64;
    let selfs: Vec<f64> = slices.iter().map(mean_self_distance).collect();
    let mut acc = Accumulator::new();
    for a in 0..slices.len() {
        for b in a + 1..slices.len() {
            let e = 2.0 * mean_cross_distance(&slices[a], &slices[b])? - selfs[a] - selfs[b];
            acc.add(slices[a].len() as f64 * slices[b].len() as f64 / (n * n) * e);
        }
    }
    Ok(acc.value())
}

fn spread(points: &PointSet) -> f64 {
    let mut s: f64 = 0.0;
    for j in 0..points.dim() {
        let (lo, hi) = points
            .iter()
            .map(|x| x[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        s = s.max(hi - lo);
    }
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn perturb<R: Rng + ?Sized>(x: &mut [f64], radius: f64, rng: &mut R) {
    for v in x {
        *v += rng.random_range(-radius..=radius);
    }
}

/// `n_k` continuous points representing the empirical distribution of `pool`.
fn prototypes<R: Rng + ?Sized>(pool: &PointSet, nk: usize, rng: &mut R) -> Result<PointSet> {
    let scale = spread(pool);
    let radius = PROTOTYPE_JITTER * scale;
    let picked = index::sample(rng, pool.len(), nk).into_vec();
    let mut x = pool.select(&picked);
    for i in 0..x.len() {
        perturb(x.row_mut(i), radius, rng);
    }
    let empty = PointSet::new(pool.dim());
    let mut repairs = 0;
    let mut iter = 0;
    while iter < PROTOTYPE_MAX_ITER {
        let next = match sequential_targets(&x, &empty, pool, 0.0) {
            Ok(next) => next,
            Err(Error::ZeroDistance { point }) if repairs < REPAIR_BUDGET => {
                repairs += 1;
                perturb(x.row_mut(point), radius, rng);
                continue;
            }
            // a prototype sitting on a pool point is usable as is
            Err(Error::ZeroDistance { .. }) => break,
            Err(e) => return Err(e),
        };
        let moved = x
            .iter()
            .zip(next.iter())
            .map(|(a, b)| distance(a, b))
            .fold(0.0, f64::max);
        x = next;
        iter += 1;
        if moved < PROTOTYPE_TOL * scale {
            break;
        }
    }
    Ok(x)
}

/// Globally greedy matching: repeatedly takes the closest remaining
/// (prototype, pool point) pair; ties go to the lower pool index, then the
/// lower prototype index. Returns positions within `pool`.
fn match_nearest(protos: &PointSet, pool: &PointSet) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(protos.len() * pool.len());
    for (i, x) in protos.iter().enumerate() {
        for (j, y) in pool.iter().enumerate() {
            pairs.push((distance(x, y), j, i));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut proto_done = vec![false; protos.len()];
    let mut pool_done = vec![false; pool.len()];
    let mut chosen = Vec::with_capacity(protos.len());
    for (_, j, i) in pairs {
        if !proto_done[i] && !pool_done[j] {
            proto_done[i] = true;
            pool_done[j] = true;
            chosen.push(j);
            if chosen.len() == protos.len() {
                break;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Pairwise swap descent on `-sum_k W_k / n_k`, where `W_k` is the sum of
/// within-slice distances; this is the partition objective up to a constant.
fn refine(points: &PointSet, labels: &mut [usize], sizes: &[usize]) {
    let n = points.len();
    let k = sizes.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(points.row(i), points.row(j));
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // t[i * k + s] = sum of distances from i to members of slice s
    let mut t = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..n {
            t[i * k + labels[j]] += dist[i * n + j];
        }
    }
    let scale = dist.iter().fold(0.0, |m: f64, &d| m.max(d));
    let min_gain = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..100 * n {
        let mut best = (0.0, 0, 0);
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (labels[i], labels[j]);
                if a == b {
                    continue;
                }
                let dij = dist[i * n + j];
                let dwa = 2.0 * (t[j * k + a] - dij - t[i * k + a]);
                let dwb = 2.0 * (t[i * k + b] - dij - t[j * k + b]);
                let gain = dwa / sizes[a] as f64 + dwb / sizes[b] as f64;
                if gain > best.0 {
                    best = (gain, i, j);
                }
            }
        }
        if best.0 <= min_gain {
            return;
        }
        let (_, i, j) = best;
        let (a, b) = (labels[i], labels[j]);
        for l in 0..n {
            let delta = dist[l * n + j] - dist[l * n + i];
            t[l * k + a] += delta;
            t[l * k + b] -= delta;
        }
        labels.swap(i, j);
    }
}

/// Energy-guided partition of a fixed point set. Slices are built in the
/// plan's order: single-set MM prototypes fit the remaining pool, each
/// prototype claims its nearest unassigned pool point, and the last slice
/// takes what is left. An optional swap descent then polishes the split.
/// Points are never moved; only labels are assigned.
pub fn energy_partition<R: Rng + ?Sized>(
    points: &PointSet,
    plan: &PartitionPlan,
    rng: &mut R,
) -> Result<SlicedDesign> {
    plan.check(points.len())?;
    let mut best: Option<(f64, SlicedDesign)> = None;
    for r in 0..plan.restarts {
        let d = if r % 2 == 0 || !plan.refine || plan.sizes.len() == 1 {
            greedy_split(points, plan, rng)?
        } else {
            let mut d = random_partition(points, plan, rng)?;
            let mut labels = d.labels().to_vec();
            refine(points, &mut labels, &plan.sizes);
            d = SlicedDesign::new(points.clone(), labels, plan.sizes.len())?;
            d
        };
        let obj = partition_objective(&d)?;
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, d));
        }
    }
    Ok(best.expect("restarts >= 1").1)
}

fn greedy_split<R: Rng + ?Sized>(
    points: &PointSet,
    plan: &PartitionPlan,
    rng: &mut R,
) -> Result<SlicedDesign> {
    let order = plan.stage_order();
    let mut labels = vec![usize::MAX; points.len()];
    let mut pool: Vec<usize> = (0..points.len()).collect();
    for (stage, &k) in order.iter().enumerate() {
        if stage + 1 == order.len() {
            for &i in &pool {
                labels[i] = k;
            }
            break;
        }
        let pool_points = points.select(&pool);
        let protos = prototypes(&pool_points, plan.sizes[k], rng)?;
        let chosen = match_nearest(&protos, &pool_points);
        for &c in &chosen {
            labels[pool[c]] = k;
        }
        let mut keep = vec![true; pool.len()];
        for &c in &chosen {
            keep[c] = false;
        }
        pool = pool
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(&i, _)| i)
            .collect();
    }
    if plan.refine && plan.sizes.len() > 1 {
        refine(points, &mut labels, &plan.sizes);
    }
    SlicedDesign::new(points.clone(), labels, plan.sizes.len())
}
