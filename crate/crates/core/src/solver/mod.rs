//! Majorization-Minimization solvers.
//!
//! Each iteration replaces every point by the minimizer of a quadratic
//! surrogate that majorizes the objective and touches it at the current
//! iterate. The surrogate is separable across points with isotropic Hessian,
//! so the per-point minimizer has a closed form and its Euclidean projection
//! onto the region is the constrained minimizer; every iteration therefore
//! descends, with or without projection (full reference batch only).
//!
//! * [`run_oneshot`]: all slices at once under the hybrid criterion.
//! * [`run_sequential`]: slices one after another, each stage repelled by
//!   the points already placed.

mod config;
mod oneshot;
mod sequential;
mod update;

use alloc::vec::Vec;

pub use config::{
    LambdaSchedule, Method, SolverConfig, DEFAULT_JITTER, DEFAULT_LAMBDA, DEFAULT_MAX_ITER,
    DEFAULT_REFERENCE_SIZE, DEFAULT_TOL,
};
pub use oneshot::run_oneshot;
pub use sequential::{default_lambda_k, run_sequential};
pub use update::{
    init_points, jitter_repair, mm_update_oneshot, mm_update_sequential, oneshot_targets,
    sequential_targets, Step, COINCIDENCE_TOL,
};

use rand::seq::index;
use rand::Rng;

use crate::points::distance;
use crate::region::Region;
use crate::{seed, Error, PointSet, Result, SlicedDesign};

/// Window of the moving average used to declare convergence in minibatch mode.
const MINIBATCH_WINDOW: usize = 10;
/// Consecutive coincidence repairs allowed before the zero-distance error is surfaced.
const MAX_REPAIRS: usize = 20;

/// Iteration history of one MM run (or one sequential stage).
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveTrace {
    /// Objective at the start (index 0) and after every iteration, always
    /// evaluated on the full reference sample.
    pub objective: Vec<f64>,
    /// Largest Euclidean point movement of each iteration.
    pub movement: Vec<f64>,
    /// Whether projection changed any point in that iteration.
    pub projection_active: Vec<bool>,
    /// Steps whose starting iterate was jitter-repaired after a coincidence.
    pub repairs: Vec<Repair>,
    pub iterations: usize,
    pub converged: bool,
    pub final_movement: f64,
    /// Balancing weight used (`lambda` or the stage's `lambda_k`).
    pub lambda: f64,
    /// Slice built by this stage (sequential runs only).
    pub slice: Option<usize>,
}

/// A coincidence repair applied before step `iteration` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Repair {
    pub iteration: usize,
    /// Objective of the repaired iterate.
    pub objective: f64,
}

impl SolveTrace {
    /// Objective of the iterate that step `t` (1-based) started from: the
    /// previous entry, or its repaired replacement.
    pub fn step_start(&self, t: usize) -> f64 {
        self.repairs
            .iter()
            .rev()
            .find(|r| r.iteration == t)
            .map_or(self.objective[t - 1], |r| r.objective)
    }

    /// Steps whose objective rose by more than `tol` over their start,
    /// ignoring steps where projection was active.
    pub fn descent_violations(&self, tol: f64) -> Vec<usize> {
        (1..=self.iterations)
            .filter(|&t| !self.projection_active[t - 1])
            .filter(|&t| self.objective[t] > self.step_start(t) + tol)
            .collect()
    }
}

/// Design plus the traces of every run or stage that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub design: SlicedDesign,
    pub traces: Vec<SolveTrace>,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.traces.iter().all(|t| t.converged)
    }
}

/// Runs the configured method with a generator seeded from `cfg.seed`.
pub fn solve(region: &Region, cfg: &SolverConfig) -> Result<Solution> {
    let mut rng = seed::rng(cfg.seed);
    match cfg.method {
        Method::Mhed | Method::ComM => {
            let (design, trace) = run_oneshot(region, cfg, &mut rng)?;
            Ok(Solution {
                design,
                traces: alloc::vec![trace],
            })
        }
        Method::SeqHed | Method::SeqM => {
            let (design, traces) = run_sequential(region, cfg, &mut rng)?;
            Ok(Solution { design, traces })
        }
    }
}

/// Largest Euclidean movement between two iterates of the same shape.
pub(crate) fn max_movement(a: &PointSet, b: &PointSet) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| distance(x, y))
        .fold(0.0, f64::max)
}

/// Plumbing shared by both solvers: minibatch selection, coincidence repair,
/// convergence bookkeeping.
pub(crate) struct Driver<'a> {
    pub reference: &'a PointSet,
    pub cfg: &'a SolverConfig,
    pub region: &'a Region,
    pub lambda: f64,
}

impl Driver<'_> {
    pub fn run<R, S, O>(
        &self,
        mut x: PointSet,
        fixed: &[&PointSet],
        rng: &mut R,
        mut step: S,
        objective: O,
    ) -> Result<(PointSet, SolveTrace)>
    where
        R: Rng + ?Sized,
        S: FnMut(&PointSet, &PointSet) -> Result<Step>,
        O: Fn(&PointSet) -> Result<f64>,
    {
        let mut others: Vec<&PointSet> = fixed.to_vec();
        others.push(self.reference);
        x = jitter_repair(&x, self.cfg.jitter, self.region, rng, &others)?;

        let mut trace = SolveTrace {
            lambda: self.lambda,
            final_movement: f64::INFINITY,
            ..SolveTrace::default()
        };
        trace.objective.push(objective(&x)?);
        let mut repairs = 0;
        while trace.iterations < self.cfg.max_iter {
            let batch_storage;
            let batch = match self.cfg.batch_size {
                Some(b) if b < self.reference.len() => {
                    let picked = index::sample(rng, self.reference.len(), b).into_vec();
                    batch_storage = self.reference.select(&picked);
                    &batch_storage
                }
                _ => self.reference,
            };
            let next = match step(&x, batch) {
                Ok(s) => s,
                Err(Error::ZeroDistance { .. }) if repairs < MAX_REPAIRS => {
                    repairs += 1;
                    x = jitter_repair(&x, self.cfg.jitter, self.region, rng, &others)?;
                    trace.repairs.push(Repair {
                        iteration: trace.iterations + 1,
                        objective: objective(&x)?,
                    });
                    continue;
                }
                Err(e) => return Err(e),
            };
            repairs = 0;
            let moved = max_movement(&x, &next.points);
            x = next.points;
            trace.iterations += 1;
            trace.objective.push(objective(&x)?);
            trace.movement.push(moved);
            trace.projection_active.push(next.projection_active);
            trace.final_movement = moved;
            if self.has_converged(&trace.movement) {
                trace.converged = true;
                break;
            }
        }
        Ok((x, trace))
    }

    fn has_converged(&self, movement: &[f64]) -> bool {
        match self.cfg.batch_size {
            Some(b) if b < self.reference.len() => {
                movement.len() >= MINIBATCH_WINDOW
                    && crate::sum::sum(movement[movement.len() - MINIBATCH_WINDOW..].iter().copied())
                        / (MINIBATCH_WINDOW as f64)
                        < self.cfg.tol
            }
            _ => movement.last().is_some_and(|&m| m < self.cfg.tol),
        }
    }
}
