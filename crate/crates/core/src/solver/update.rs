//! Closed-form MM steps, initialization and coincidence repair.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::points::distance;
use crate::region::Region;
use crate::sum::VecAccumulator;
use crate::{Error, PointSet, Result, SlicedDesign};

/// Points closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// A projection that moves a point by more than this counts as active.
const PROJECTION_ACTIVE_TOL: f64 = 1e-12;
const JITTER_ROUNDS: usize = 100;

/// Distance-weighted pull toward the batch.
struct Pull {
    /// `mean_m 1/d_m` over batch points not coincident with `x`.
    weight: f64,
    /// `mean_m y_m/d_m` over the same points.
    target: Vec<f64>,
    /// Share of the batch coincident with `x`, and one such point.
    cusp: Option<(f64, Vec<f64>)>,
}

fn pull(x: &[f64], batch: &PointSet, point: usize) -> Result<Pull> {
    let mut weight = 0.0;
    let mut target = alloc::vec![0.0; x.len()];
    let mut coincident = 0usize;
    let mut anchor: Option<&[f64]> = None;
    for y in batch {
        let d = distance(x, y);
        if d < COINCIDENCE_TOL {
            coincident += 1;
            anchor.get_or_insert(y);
            continue;
        }
        let w = 1.0 / d;
        weight += w;
        for (t, v) in target.iter_mut().zip(y) {
            *t += w * v;
        }
    }
    if weight == 0.0 {
        return Err(Error::ZeroDistance { point });
    }
    let n = batch.len() as f64;
    for v in &mut target {
        *v /= n;
    }
    Ok(Pull {
        weight: weight / n,
        target,
        cusp: anchor.map(|a| (coincident as f64 / n, a.to_vec())),
    })
}

/// `sum_j (x - x_j) / ||x - x_j||` over the given points.
fn repulsion<'a, I>(x: &[f64], others: I, point: usize) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = VecAccumulator::new(x.len());
    let mut diff = alloc::vec![0.0; x.len()];
    for other in others {
        let d = distance(x, other);
        if d < COINCIDENCE_TOL {
            return Err(Error::ZeroDistance { point });
        }
        for (k, v) in diff.iter_mut().enumerate() {
            *v = x[k] - other[k];
        }
        acc.add_scaled(&diff, 1.0 / d);
    }
    Ok(acc.values())
}

/// Minimizes the per-point surrogate. A batch point coincident with the
/// current iterate keeps its exact term `c ||x - y0||`, so the minimizer is
/// the smooth minimizer `T` shrunk toward `y0` by `c / W`.
fn combine(pull: &Pull, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let t: Vec<f64> = (0..pull.target.len())
        .map(|j| {
            let mut v = pull.target[j];
            for (c, term) in terms {
                v += c * term[j];
            }
            v / pull.weight
        })
        .collect();
    let Some((share, anchor)) = &pull.cusp else {
        return t;
    };
    let r = distance(&t, anchor);
    let shrink = share / pull.weight;
    if r <= shrink {
        return anchor.clone();
    }
    let keep = (r - shrink) / r;
    anchor.iter().zip(&t).map(|(a, v)| a + keep * (v - a)).collect()
}

/// Unprojected one-shot update of every point:
///
/// ```text
/// x_i <- W^-1 [ mean_m y_m/d_im + (1-l)/n_k sum_{j in slice, j!=i} u_ij
///                               + l/n sum_{j != i} u_ij ]
/// ```
///
/// with `u_ij = (x_i - x_j)/||x_i - x_j||` and `W = mean_m 1/d_im`. All
/// reads come from `design` (Jacobi sweep).
pub fn oneshot_targets(design: &SlicedDesign, batch: &PointSet, lambda: f64) -> Result<PointSet> {
    design.require_nonempty_slices()?;
    design.points().check_dim(batch)?;
    if batch.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let pts = design.points();
    let labels = design.labels();
    let n = pts.len() as f64;
    let mut out = PointSet::with_capacity(pts.dim(), pts.len());
    for i in 0..pts.len() {
        let x = pts.row(i);
        let k = labels[i];
        let nk = design.sizes()[k] as f64;
        let pulled = pull(x, batch, i)?;
        let inside = repulsion(
            x,
            (0..pts.len()).filter(|&j| j != i && labels[j] == k).map(|j| pts.row(j)),
            i,
        )?;
        let outside = repulsion(
            x,
            (0..pts.len()).filter(|&j| labels[j] != k).map(|j| pts.row(j)),
            i,
        )?;
        let all: Vec<f64> = inside.iter().zip(&outside).map(|(a, b)| a + b).collect();
        out.push(&combine(&pulled, &[((1.0 - lambda) / nk, &inside), (lambda / n, &all)]))?;
    }
    Ok(out)
}

/// Unprojected sequential-stage update of the subset `pk` with the
/// accumulated set `pc` held fixed:
///
/// ```text
/// x_i <- W^-1 [ mean_m y_m/d_im + (1-s)/n_k sum_{j in P_k, j!=i} u_ij
///                               + s/n_c sum_{j in P_c} u_ij ],   s = l n_c/(n_c+n_k)
/// ```
pub fn sequential_targets(
    pk: &PointSet,
    pc: &PointSet,
    batch: &PointSet,
    lambda_k: f64,
) -> Result<PointSet> {
    if pk.is_empty() || batch.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    pk.check_dim(batch)?;
    pk.check_dim(pc)?;
    let nk = pk.len() as f64;
    let nc = pc.len() as f64;
    let share = if pc.is_empty() {
        0.0
    } else {
        lambda_k * nc / (nc + nk)
    };
    let cross_coef = if pc.is_empty() { 0.0 } else { share / nc };
    let mut out = PointSet::with_capacity(pk.dim(), pk.len());
    for i in 0..pk.len() {
        let x = pk.row(i);
        let pulled = pull(x, batch, i)?;
        let inside = repulsion(x, (0..pk.len()).filter(|&j| j != i).map(|j| pk.row(j)), i)?;
        let cross = repulsion(x, pc.iter(), i)?;
        out.push(&combine(&pulled, &[((1.0 - share) / nk, &inside), (cross_coef, &cross)]))?;
    }
    Ok(out)
}

/// Result of one projected MM step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub points: PointSet,
    /// Projection moved at least one point.
    pub projection_active: bool,
}

fn project_all(region: &Region, targets: PointSet) -> Result<Step> {
    let mut out = PointSet::with_capacity(targets.dim(), targets.len());
    let mut active = false;
    for t in &targets {
        let x = region.project(t)?;
        if distance(&x, t) > PROJECTION_ACTIVE_TOL {
            active = true;
        }
        out.push(&x)?;
    }
    Ok(Step {
        points: out,
        projection_active: active,
    })
}

/// One-shot MM step followed by projection onto the region.
pub fn mm_update_oneshot(
    design: &SlicedDesign,
    batch: &PointSet,
    lambda: f64,
    region: &Region,
) -> Result<Step> {
    project_all(region, oneshot_targets(design, batch, lambda)?)
}

/// Sequential-stage MM step followed by projection onto the region.
pub fn mm_update_sequential(
    pk: &PointSet,
    pc: &PointSet,
    batch: &PointSet,
    lambda_k: f64,
    region: &Region,
) -> Result<Step> {
    project_all(region, sequential_targets(pk, pc, batch, lambda_k)?)
}

fn jitter_point<R: Rng + ?Sized>(x: &[f64], tau: f64, region: &Region, rng: &mut R) -> Result<Vec<f64>> {
    if tau == 0.0 {
        return Ok(x.to_vec());
    }
    let noisy: Vec<f64> = x.iter().map(|v| v + rng.random_range(-tau..=tau)).collect();
    region.project(&noisy)
}

/// Picks `n` distinct reference points at random, adds uniform noise in
/// `[-tau, tau]^p` and projects back onto the region.
pub fn init_points<R: Rng + ?Sized>(
    reference: &PointSet,
    n: usize,
    tau: f64,
    region: &Region,
    rng: &mut R,
) -> Result<PointSet> {
    if n > reference.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "cannot draw {n} distinct points from a reference sample of {}",
            reference.len()
        )));
    }
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::InvalidArgument("jitter radius must be nonnegative".into()));
    }
    let picked = index::sample(rng, reference.len(), n);
    let mut out = PointSet::with_capacity(reference.dim(), n);
    for u in picked.iter() {
        out.push(&jitter_point(reference.row(u), tau, region, rng)?)?;
    }
    Ok(out)
}

/// Perturbs points that coincide with an earlier point of the same set or
/// with any point of `others` (within [`COINCIDENCE_TOL`]) until all are
/// separated. The later member of a coincident pair is the one moved.
pub fn jitter_repair<R: Rng + ?Sized>(
    points: &PointSet,
    tau: f64,
    region: &Region,
    rng: &mut R,
    others: &[&PointSet],
) -> Result<PointSet> {
    let mut pts = points.clone();
    for _ in 0..JITTER_ROUNDS {
        let mut moved = false;
        for i in 0..pts.len() {
            let x = pts.row(i);
            let clash = (0..i).any(|j| distance(x, pts.row(j)) < COINCIDENCE_TOL)
                || others
                    .iter()
                    .any(|set| set.iter().any(|y| distance(x, y) < COINCIDENCE_TOL));
            if clash {
                let new = jitter_point(x, tau, region, rng)?;
                pts.row_mut(i).copy_from_slice(&new);
                moved = true;
            }
        }
        if !moved {
            return Ok(pts);
        }
    }
    Err(Error::JitterBudgetExhausted {
        rounds: JITTER_ROUNDS,
    })
}
