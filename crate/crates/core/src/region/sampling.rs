//! Uniform sampling on regions.
//!
//! * standard simplex: normalized exponential spacings (flat Dirichlet), exact;
//! * bounded simplex: rejection from the flat Dirichlet, falling back to
//!   hit-and-run when acceptance stalls;
//! * polytope: hit-and-run from the interior point.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{orthonormalize, LinearRow, Region, RegionKind};
use crate::points::{dot, norm};
use crate::{Error, PointSet, Result};

/// Rejection attempts allowed per requested point.
pub const REJECTION_BUDGET_PER_POINT: usize = 10_000;
/// Hit-and-run steps per emitted point, per dimension.
pub const HIT_AND_RUN_STEPS_PER_DIM: usize = 10;

/// Constraint rows with slack below this are treated as equalities by
/// hit-and-run (flat faces of a degenerate region).
const TIGHT_SLACK: f64 = 1e-9;

impl Region {
    /// `count` points distributed uniformly on the region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<PointSet> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        match self.kind() {
            RegionKind::StandardSimplex => {
                let mut out = PointSet::with_capacity(self.dim(), count);
                for _ in 0..count {
                    out.push(&flat_dirichlet(self.dim(), rng))?;
                }
                Ok(out)
            }
            RegionKind::BoundedSimplex { .. } if !self.is_degenerate() => {
                let mut out = PointSet::with_capacity(self.dim(), count);
                let mut attempts = 0usize;
                while out.len() < count {
                    let x = flat_dirichlet(self.dim(), rng);
                    attempts += 1;
                    if self.contains(&x, 0.0)? {
                        out.push(&x)?;
                    } else if attempts > REJECTION_BUDGET_PER_POINT * (out.len() + 1) {
                        let rest = self.sample_hit_and_run(count - out.len(), rng)?;
                        out.extend_from(&rest)?;
                    }
                }
                Ok(out)
            }
            _ => self.sample_hit_and_run(count, rng),
        }
    }

    /// Pure rejection from the flat Dirichlet with a total budget of
    /// [`REJECTION_BUDGET_PER_POINT`] attempts per point.
    pub fn sample_rejection<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<PointSet> {
        let budget = REJECTION_BUDGET_PER_POINT.saturating_mul(count);
        let mut out = PointSet::with_capacity(self.dim(), count);
        let mut attempts = 0;
        while out.len() < count {
            if attempts >= budget {
                return Err(Error::RejectionBudgetExhausted {
                    accepted: out.len(),
                    attempts,
                });
            }
            attempts += 1;
            let x = flat_dirichlet(self.dim(), rng);
            if self.contains(&x, 0.0)? {
                out.push(&x)?;
            }
        }
        Ok(out)
    }

    /// Hit-and-run chain started at the interior point, thinned to
    /// `10 * p` steps per emitted point.
    pub fn sample_hit_and_run<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<PointSet> {
        let mut chain = HitAndRun::new(self)?;
        let mut out = PointSet::with_capacity(self.dim(), count);
        for _ in 0..count {
            out.push(&chain.next_point(rng))?;
        }
        Ok(out)
    }
}

/// Uniform point on the standard simplex.
fn flat_dirichlet<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = x.iter().sum();
        if total > 0.0 && total.is_finite() {
            for v in &mut x {
                *v /= total;
            }
            return x;
        }
    }
}

/// Hit-and-run Markov chain on a region.
///
/// Directions are isotropic within the affine hull of the region: the
/// equality rows and any inequality that is tight at the start point are
/// projected out, so degenerate regions are sampled on their flat face.
#[derive(Debug, Clone)]
pub struct HitAndRun<'a> {
    region: &'a Region,
    /// Orthonormal rows the chain must stay on (equalities + tight faces).
    fixed: Vec<LinearRow>,
    /// Half-spaces that bound the chord.
    bounding: Vec<&'a LinearRow>,
    x: Vec<f64>,
    steps_per_point: usize,
}

impl<'a> HitAndRun<'a> {
    pub fn new(region: &'a Region) -> Result<Self> {
        let c = region.constraints();
        let start = region.interior_point().point.clone();
        let mut tight = Vec::new();
        let mut bounding = Vec::new();
        for h in &c.halfspaces {
            if -h.residual(&start) < TIGHT_SLACK {
                tight.push(LinearRow {
                    coef: h.coef.clone(),
                    rhs: dot(&h.coef, &start),
                });
            } else {
                bounding.push(h);
            }
        }
        let fixed = orthonormalize(region.dim(), &c.eq_basis, &tight)?;
        Ok(Self {
            region,
            fixed,
            bounding,
            x: start,
            steps_per_point: HIT_AND_RUN_STEPS_PER_DIM * region.dim(),
        })
    }

    pub fn current(&self) -> &[f64] {
        &self.x
    }

    /// One hit-and-run move.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let p = self.region.dim();
        let mut d: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for _ in 0..2 {
            for q in &self.fixed {
                let a = dot(&q.coef, &d);
                for (di, qi) in d.iter_mut().zip(&q.coef) {
                    *di -= a * qi;
                }
            }
        }
        let len = norm(&d);
        if len < 1e-12 {
            return;
        }
        for di in &mut d {
            *di /= len;
        }
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for h in &self.bounding {
            let rate = dot(&h.coef, &d);
            let slack = (-h.residual(&self.x)).max(0.0);
            if rate > 1e-14 {
                hi = hi.min(slack / rate);
            } else if rate < -1e-14 {
                lo = lo.max(slack / rate);
            }
        }
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return;
        }
        let t = lo + (hi - lo) * rng.random::<f64>();
        for (xi, di) in self.x.iter_mut().zip(&d) {
            *xi += t * di;
        }
        // remove rounding drift off the affine hull
        for q in &self.fixed {
            let r = q.residual(&self.x);
            for (xi, qi) in self.x.iter_mut().zip(&q.coef) {
                *xi -= r * qi;
            }
        }
    }

    /// Advances the chain by the thinning interval and returns the state.
    pub fn next_point<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        for _ in 0..self.steps_per_point {
            self.step(rng);
        }
        self.x.clone()
    }
}
