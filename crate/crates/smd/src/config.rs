//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use smd_core::metrics::{self, MomentMode};
use smd_core::region::Region;
use smd_core::solver::{self, LambdaSchedule, Method, SolverConfig};
use smd_core::ProcessGrid;

use crate::error::{CliError, Result};

/// Matrix given either as a list of rows or as one flat row-major list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Matrix {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl Matrix {
    fn flatten(&self, p: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            Matrix::Flat(v) => {
                if v.len() % p != 0 {
                    return Err(CliError::Config(format!(
                        "region.{name}: {} entries is not a multiple of p = {p}",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
            Matrix::Rows(rows) => {
                if let Some(i) = rows.iter().position(|r| r.len() != p) {
                    return Err(CliError::Config(format!(
                        "region.{name}[{i}]: expected {p} entries, found {}",
                        rows[i].len()
                    )));
                }
                Ok(rows.concat())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKindName {
    Simplex,
    Bounded,
    Polytope,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub p: usize,
    pub kind: RegionKindName,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Option<Matrix>,
    pub b: Option<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Option<Matrix>,
    pub d: Option<Vec<f64>>,
}

impl RegionConfig {
    pub fn build(&self) -> Result<Region> {
        let p = self.p;
        let only = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(CliError::Config(format!(
                    "region.{field} is not used by kind {:?}",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            RegionKindName::Simplex => {
                only(self.lower.is_some() || self.upper.is_some(), "lower/upper")?;
                only(self.a.is_some() || self.b.is_some() || self.c.is_some() || self.d.is_some(), "A/b/C/d")?;
                Ok(Region::simplex(p)?)
            }
            RegionKindName::Bounded => {
                only(self.a.is_some() || self.b.is_some() || self.c.is_some() || self.d.is_some(), "A/b/C/d")?;
                let lower = self.lower.clone().unwrap_or_else(|| vec![0.0; p]);
                let upper = self.upper.clone().unwrap_or_else(|| vec![1.0; p]);
                if lower.len() != p || upper.len() != p {
                    return Err(CliError::Config(format!(
                        "region.lower and region.upper need {p} entries"
                    )));
                }
                Ok(Region::bounded(lower, upper)?)
            }
            RegionKindName::Polytope => {
                only(self.lower.is_some() || self.upper.is_some(), "lower/upper")?;
                let a = match &self.a {
                    Some(m) => m.flatten(p, "A")?,
                    None => vec![],
                };
                let c = match &self.c {
                    Some(m) => m.flatten(p, "C")?,
                    None => vec![],
                };
                let b = self.b.clone().unwrap_or_default();
                let d = self.d.clone().unwrap_or_default();
                if b.len() * p != a.len() {
                    return Err(CliError::Config("region.b must have one entry per row of A".into()));
                }
                if d.len() * p != c.len() {
                    return Err(CliError::Config("region.d must have one entry per row of C".into()));
                }
                Ok(Region::polytope(p, a, b, c, d)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub levels: Vec<usize>,
    pub runs_per_slice: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Balanced,
    Fixed(f64),
}

fn default_lambda() -> f64 {
    solver::DEFAULT_LAMBDA
}
fn default_reference() -> usize {
    solver::DEFAULT_REFERENCE_SIZE
}
fn default_tau() -> f64 {
    solver::DEFAULT_JITTER
}
fn default_tol() -> f64 {
    solver::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    solver::DEFAULT_MAX_ITER
}
fn default_schedule() -> ScheduleConfig {
    ScheduleConfig::Balanced
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: Method,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_schedule")]
    pub lambda_schedule: ScheduleConfig,
    #[serde(rename = "N", default = "default_reference")]
    pub reference_size: usize,
    #[serde(rename = "N_s")]
    pub batch_size: Option<usize>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    /// 1-based slice indices.
    pub stage_order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentChoice {
    /// Analytic on the standard simplex, Monte Carlo elsewhere.
    #[default]
    Auto,
    Analytic,
    MonteCarlo,
}

fn default_eval_size() -> usize {
    metrics::DEFAULT_EVAL_SIZE
}
fn default_mc_size() -> usize {
    metrics::DEFAULT_MONTE_CARLO
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    #[serde(rename = "N_eval", default = "default_eval_size")]
    pub eval_size: usize,
    #[serde(default)]
    pub moments: MomentChoice,
    #[serde(default = "default_mc_size")]
    pub monte_carlo_size: usize,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            eval_size: default_eval_size(),
            moments: MomentChoice::Auto,
            monte_carlo_size: default_mc_size(),
        }
    }
}

impl EvaluationConfig {
    pub fn moment_mode(&self, region: &Region) -> MomentMode {
        match self.moments {
            MomentChoice::Analytic => MomentMode::Analytic,
            MomentChoice::MonteCarlo => MomentMode::MonteCarlo(self.monte_carlo_size),
            MomentChoice::Auto => match region.kind() {
                smd_core::RegionKind::StandardSimplex => MomentMode::Analytic,
                _ => MomentMode::MonteCarlo(self.monte_carlo_size),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub design_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub trace_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    region: RegionConfig,
    sizes: Option<Vec<usize>>,
    process: Option<ProcessConfig>,
    solver: SolverSection,
    #[serde(default)]
    evaluation: EvaluationConfig,
    #[serde(default)]
    output: OutputConfig,
}

/// Validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub region_config: RegionConfig,
    pub region: Region,
    pub grid: Option<ProcessGrid>,
    pub solver: SolverConfig,
    pub evaluation: EvaluationConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.solver.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.solver.seed = seed;
    }
}

/// Parses and validates a configuration; schema errors carry the field path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(if path == "." {
            e.inner().to_string()
        } else {
            format!("{path}: {}", e.inner())
        })
    })?;

    let region = raw.region.build()?;
    let (sizes, grid) = match (raw.sizes, raw.process) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either `sizes` or `process`, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config("one of `sizes` or `process` is required".into()))
        }
        (Some(sizes), None) => (sizes, None),
        (None, Some(process)) => {
            if process.runs_per_slice == 0 {
                return Err(CliError::Config("process.runs_per_slice must be positive".into()));
            }
            let grid = ProcessGrid::new(process.levels)
                .map_err(|e| CliError::Config(format!("process.levels: {e}")))?;
            (vec![process.runs_per_slice; grid.k()], Some(grid))
        }
    };

    let s = raw.solver;
    if !(0.0..=1.0).contains(&s.lambda) {
        return Err(CliError::Config(format!(
            "solver.lambda: λ out of [0,1] (got {})",
            s.lambda
        )));
    }
    let stage_order = match s.stage_order {
        None => None,
        Some(order) => Some(
            order
                .iter()
                .map(|&k| {
                    k.checked_sub(1).ok_or_else(|| {
                        CliError::Config("solver.stage_order: slices are numbered from 1".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let solver = SolverConfig {
        sizes,
        lambda: s.lambda,
        lambda_schedule: match s.lambda_schedule {
            ScheduleConfig::Balanced => LambdaSchedule::Balanced,
            ScheduleConfig::Fixed(l) => LambdaSchedule::Fixed(l),
        },
        reference_size: s.reference_size,
        batch_size: s.batch_size,
        jitter: s.tau,
        tol: s.tol,
        max_iter: s.max_iter,
        seed: s.seed,
        method: s.method,
        stage_order,
    };
    solver
        .validate()
        .map_err(|e| CliError::Config(format!("solver: {e}")))?;
    if raw.evaluation.eval_size == 0 {
        return Err(CliError::Config("evaluation.N_eval must be positive".into()));
    }
    Ok(RunConfig {
        region_config: raw.region,
        region,
        grid,
        solver,
        evaluation: raw.evaluation,
        output: raw.output,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"region":{"p":3,"kind":"simplex"},"sizes":[15,15,15],"solver":{"method":"MHED","seed":1}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.solver.lambda, 0.5);
        assert_eq!(c.solver.sizes, vec![15, 15, 15]);
        assert_eq!(c.solver.reference_size, 10_000);
        assert_eq!(c.seed(), 1);
    }

    #[test]
    fn sizes_and_process_are_exclusive() {
        let text = r#"{"region":{"p":3,"kind":"simplex"},"sizes":[15],"process":{"levels":[3],"runs_per_slice":15},"solver":{"method":"MHED"}}"#;
        assert!(matches!(parse_config(text), Err(CliError::Config(_))));
    }

    #[test]
    fn process_expands_to_slices() {
        let text = r#"{"region":{"p":3,"kind":"bounded","lower":[0.1,0.05,0.15],"upper":[0.8,0.6,0.7]},
            "process":{"levels":[2,2],"runs_per_slice":15},"solver":{"method":"SeqHED"}}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.solver.sizes, vec![15; 4]);
        assert_eq!(c.grid.unwrap().k(), 4);
    }

    #[test]
    fn lambda_out_of_range() {
        let text = MINIMAL.replace(r#""seed":1"#, r#""seed":1,"lambda":1.3"#);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("λ out of [0,1]"), "{err}");
    }

    #[test]
    fn unknown_fields_report_their_path() {
        let text = MINIMAL.replace(r#""seed":1"#, r#""seed":1,"lamda":0.3"#);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.starts_with("solver"), "{err}");
        assert!(err.contains("lamda"));
    }

    #[test]
    fn polytope_matrices_accept_rows_or_flat() {
        let rows = r#"{"region":{"p":3,"kind":"polytope","A":[[1,-1,0]],"b":[0]},"sizes":[4],"solver":{"method":"MHED"}}"#;
        let flat = r#"{"region":{"p":3,"kind":"polytope","A":[1,-1,0],"b":[0]},"sizes":[4],"solver":{"method":"MHED"}}"#;
        let a = parse_config(rows).unwrap();
        let b = parse_config(flat).unwrap();
        assert_eq!(a.region.kind(), b.region.kind());
    }

    #[test]
    fn stage_order_is_one_based() {
        let text = r#"{"region":{"p":3,"kind":"simplex"},"sizes":[5,10],"solver":{"method":"SeqM","stage_order":[2,1]}}"#;
        assert_eq!(parse_config(text).unwrap().solver.stage_order, Some(vec![1, 0]));
        let bad = text.replace("[2,1]", "[0,1]");
        assert!(parse_config(&bad).is_err());
    }
}
