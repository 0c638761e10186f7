use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_REFERENCE_SIZE: usize = 10_000;
pub const DEFAULT_JITTER: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Construction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    /// One-shot hybrid criterion.
    #[cfg_attr(feature = "serde", serde(rename = "MHED"))]
    Mhed,
    /// Sequential hybrid criterion with the configured `lambda_k` schedule.
    #[cfg_attr(feature = "serde", serde(rename = "SeqHED"))]
    SeqHed,
    /// Sequential construction with `lambda_k = 1`.
    #[cfg_attr(feature = "serde", serde(rename = "SeqM"))]
    SeqM,
    /// Independently optimized slices (one-shot with `lambda = 0`).
    #[cfg_attr(feature = "serde", serde(rename = "ComM"))]
    ComM,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mhed => "MHED",
            Method::SeqHed => "SeqHED",
            Method::SeqM => "SeqM",
            Method::ComM => "ComM",
        }
    }

    pub fn is_sequential(self) -> bool {
        matches!(self, Method::SeqHed | Method::SeqM)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MHED" => Ok(Method::Mhed),
            "SeqHED" => Ok(Method::SeqHed),
            "SeqM" => Ok(Method::SeqM),
            "ComM" => Ok(Method::ComM),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// How `lambda_k` is chosen per sequential stage.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LambdaSchedule {
    Fixed(f64),
    /// `(n_c + n_k) / (2 n_c)`, clamped to `[0, 1]`: the accumulated set and
    /// the current subset get equal weight in the update direction.
    Balanced,
}

/// Tunables of both solvers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    /// Slice sizes `n_1..n_K`.
    pub sizes: Vec<usize>,
    pub lambda: f64,
    pub lambda_schedule: LambdaSchedule,
    /// Reference sample size `N`.
    pub reference_size: usize,
    /// Optional minibatch size drawn from the reference sample each iteration.
    pub batch_size: Option<usize>,
    /// Initial jitter radius `tau`.
    pub jitter: f64,
    /// Convergence threshold on the largest point movement.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub method: Method,
    /// Sequential stage order (slice indices); ascending sizes when `None`.
    pub stage_order: Option<Vec<usize>>,
}

impl SolverConfig {
    pub fn new(sizes: Vec<usize>, method: Method) -> Self {
        Self {
            sizes,
            lambda: DEFAULT_LAMBDA,
            lambda_schedule: LambdaSchedule::Balanced,
            reference_size: DEFAULT_REFERENCE_SIZE,
            batch_size: None,
            jitter: DEFAULT_JITTER,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            method,
            stage_order: None,
        }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.sizes.is_empty() {
            return bad("at least one slice size is required".into());
        }
        if let Some(k) = self.sizes.iter().position(|&s| s == 0) {
            return bad(format!("slice {} has size 0", k + 1));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("lambda {} out of [0,1]", self.lambda));
        }
        if let LambdaSchedule::Fixed(l) = self.lambda_schedule {
            if !(0.0..=1.0).contains(&l) {
                return bad(format!("lambda_k {l} out of [0,1]"));
            }
        }
        if self.reference_size < self.total() {
            return bad(format!(
                "reference size {} is smaller than the design size {}",
                self.reference_size,
                self.total()
            ));
        }
        if let Some(b) = self.batch_size {
            if b == 0 || b > self.reference_size {
                return bad(format!("batch size {b} must lie in 1..={}", self.reference_size));
            }
        }
        if !(self.jitter > 0.0 && self.jitter.is_finite()) {
            return bad("jitter must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if let Some(order) = &self.stage_order {
            let mut seen = alloc::vec![false; self.sizes.len()];
            if order.len() != self.sizes.len() {
                return bad("stage order must list every slice once".into());
            }
            for &k in order {
                if k >= seen.len() || seen[k] {
                    return bad("stage order must list every slice once".into());
                }
                seen[k] = true;
            }
        }
        Ok(())
    }
}
