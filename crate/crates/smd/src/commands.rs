//! The `generate`, `evaluate` and `compare` commands.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use smd_core::metrics::{self, evaluate, true_moments, Metric, MetricsReport, MomentSpec, Summary};
use smd_core::partition::{energy_partition, random_partition, PartitionPlan};
use smd_core::region::Region;
use smd_core::solver::{solve, Method, SolveTrace, SolverConfig};
use smd_core::{seed, PointSet, SlicedDesign};

use crate::config::RunConfig;
use crate::design_io::{format_g17, read_design_file, write_design, write_design_file};
use crate::error::{CliError, Result};

const EVAL_STREAM: u64 = 0xE7A1;
const MOMENT_STREAM: u64 = 0x303E;
const PARTITION_STREAM: u64 = 0x9A27;

/// Looser feasibility tolerance for designs read from disk.
pub const EXTERNAL_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct StageSummary {
    /// 1-based slice built by a sequential stage.
    pub slice: Option<usize>,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_movement: f64,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub repairs: usize,
}

impl From<&SolveTrace> for StageSummary {
    fn from(t: &SolveTrace) -> Self {
        Self {
            slice: t.slice.map(|s| s + 1),
            lambda: t.lambda,
            iterations: t.iterations,
            converged: t.converged,
            final_movement: t.final_movement,
            initial_objective: t.objective[0],
            final_objective: *t.objective.last().expect("initial objective"),
            repairs: t.repairs.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceLevels {
    pub slice: usize,
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateReport {
    pub seed: u64,
    pub method: String,
    pub sizes: Vec<usize>,
    pub lambda: f64,
    pub converged: bool,
    pub stages: Vec<StageSummary>,
    pub metrics: MetricsReport,
    pub moments: MomentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<Vec<SliceLevels>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateReport {
    pub seed: u64,
    pub design: PathBuf,
    pub metrics: MetricsReport,
    pub moments: MomentSpec,
    /// 1-based rows outside the region at the external tolerance.
    pub infeasible_rows: Vec<usize>,
    pub flags: Vec<String>,
}

fn moments_for(cfg: &RunConfig, run_seed: u64) -> Result<MomentSpec> {
    let mode = cfg.evaluation.moment_mode(&cfg.region);
    let mut rng = seed::rng(seed::derive(run_seed, MOMENT_STREAM));
    Ok(true_moments(&cfg.region, mode, &mut rng)?)
}

fn eval_sample(region: &Region, size: usize, run_seed: u64) -> Result<PointSet> {
    let mut rng = seed::rng(seed::derive(run_seed, EVAL_STREAM));
    Ok(region.sample_uniform(size, &mut rng)?)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Output of `generate`, before anything is written.
pub struct Generated {
    pub design: SlicedDesign,
    pub traces: Vec<SolveTrace>,
    pub report: GenerateReport,
}

pub fn run_generate(cfg: &RunConfig) -> Result<Generated> {
    let sol = solve(&cfg.region, &cfg.solver)?;
    let bad = sol.design.infeasible_points(&cfg.region, smd_core::region::MEMBERSHIP_TOL)?;
    if !bad.is_empty() {
        return Err(CliError::Runtime(format!(
            "solver produced {} infeasible points",
            bad.len()
        )));
    }
    let moments = moments_for(cfg, cfg.seed())?;
    let eval = eval_sample(&cfg.region, cfg.evaluation.eval_size, cfg.seed())?;
    let metrics = evaluate(&sol.design, &eval, &moments)?;
    let process = cfg.grid.as_ref().map(|g| {
        g.labels()
            .iter()
            .enumerate()
            .map(|(k, levels)| SliceLevels {
                slice: k + 1,
                levels: levels.clone(),
            })
            .collect()
    });
    let report = GenerateReport {
        seed: cfg.seed(),
        method: cfg.solver.method.name().into(),
        sizes: cfg.solver.sizes.clone(),
        lambda: cfg.solver.lambda,
        converged: sol.converged(),
        stages: sol.traces.iter().map(StageSummary::from).collect(),
        metrics,
        moments,
        process,
    };
    Ok(Generated {
        design: sol.design,
        traces: sol.traces,
        report,
    })
}

/// `smd generate`: design CSV to `output.design_path` (stdout when unset),
/// report and traces to their paths when set.
pub fn cmd_generate(cfg: &RunConfig) -> Result<()> {
    let g = run_generate(cfg)?;
    match &cfg.output.design_path {
        Some(path) => write_design_file(&g.design, path)?,
        None => write_design(&g.design, std::io::stdout().lock())?,
    }
    if let Some(path) = &cfg.output.report_path {
        write_json(&g.report, path)?;
    }
    if let Some(path) = &cfg.output.trace_path {
        write_json(&g.traces, path)?;
    }
    if !g.report.converged {
        eprintln!("warning: solver stopped at max_iter before converging");
    }
    Ok(())
}

/// Metrics of the design at `design_path`. `eval_override` replaces the
/// random evaluation sample.
pub fn run_evaluate(
    cfg: &RunConfig,
    design_path: &Path,
    eval_override: Option<&PointSet>,
) -> Result<EvaluateReport> {
    let design = read_design_file(design_path, cfg.region.dim())?;
    let infeasible: Vec<usize> = design
        .infeasible_points(&cfg.region, EXTERNAL_FEASIBILITY_TOL)?
        .into_iter()
        .map(|i| i + 1)
        .collect();
    let moments = moments_for(cfg, cfg.seed())?;
    let sampled;
    let eval = match eval_override {
        Some(e) => e,
        None => {
            sampled = eval_sample(&cfg.region, cfg.evaluation.eval_size, cfg.seed())?;
            &sampled
        }
    };
    let metrics = evaluate(&design, eval, &moments)?;
    let mut flags = Vec::new();
    if !infeasible.is_empty() {
        flags.push("infeasible_points".to_string());
    }
    Ok(EvaluateReport {
        seed: cfg.seed(),
        design: design_path.to_path_buf(),
        metrics,
        moments,
        infeasible_rows: infeasible,
        flags,
    })
}

pub fn cmd_evaluate(cfg: &RunConfig, design_path: &Path, out: Option<&Path>) -> Result<()> {
    let report = run_evaluate(cfg, design_path, None)?;
    if !report.infeasible_rows.is_empty() {
        eprintln!(
            "warning: {} rows lie outside the region (tolerance {EXTERNAL_FEASIBILITY_TOL:e})",
            report.infeasible_rows.len()
        );
    }
    match out {
        Some(path) => write_json(&report, path),
        None => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
            writeln!(std::io::stdout().lock(), "{text}")
                .map_err(|e| CliError::Runtime(format!("writing report: {e}")))
        }
    }
}

/// Construction compared by `smd compare`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareMethod {
    Solver(Method),
    /// Energy partition of a single-set design.
    ParM,
    /// Random partition of a single-set design.
    RandParM,
    /// Independent uniform points, labeled in order.
    RandomUniform,
}

impl CompareMethod {
    pub const ALL: [CompareMethod; 7] = [
        CompareMethod::Solver(Method::Mhed),
        CompareMethod::Solver(Method::SeqHed),
        CompareMethod::Solver(Method::SeqM),
        CompareMethod::Solver(Method::ComM),
        CompareMethod::ParM,
        CompareMethod::RandParM,
        CompareMethod::RandomUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompareMethod::Solver(m) => m.name(),
            CompareMethod::ParM => "ParM",
            CompareMethod::RandParM => "RandParM",
            CompareMethod::RandomUniform => "RandomUniform",
        }
    }

    fn stream(self) -> u64 {
        Self::ALL.iter().position(|&m| m == self).expect("listed") as u64 + 1
    }
}

impl fmt::Display for CompareMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompareMethod {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        CompareMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = CompareMethod::ALL.iter().map(|m| m.name()).collect();
                CliError::Config(format!("unknown method {s:?} (expected one of {})", names.join(", ")))
            })
    }
}

pub fn parse_methods(list: &str) -> Result<Vec<CompareMethod>> {
    let methods: Vec<CompareMethod> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(CliError::Config("no methods given".into()));
    }
    Ok(methods)
}

/// Builds one design with `method`, all randomness drawn from `run_seed`.
pub fn build_design(
    method: CompareMethod,
    region: &Region,
    solver: &SolverConfig,
    run_seed: u64,
) -> Result<SlicedDesign> {
    let sizes = &solver.sizes;
    let n: usize = sizes.iter().sum();
    let single_set = || -> Result<PointSet> {
        let mut cfg = solver.clone();
        cfg.sizes = vec![n];
        cfg.method = Method::ComM;
        cfg.stage_order = None;
        cfg.seed = run_seed;
        Ok(solve(region, &cfg)?.design.points().clone())
    };
    let mut prng = seed::rng(seed::derive(run_seed, PARTITION_STREAM));
    match method {
        CompareMethod::Solver(m) => {
            let mut cfg = solver.clone();
            cfg.method = m;
            cfg.seed = run_seed;
            Ok(solve(region, &cfg)?.design)
        }
        CompareMethod::ParM => Ok(energy_partition(
            &single_set()?,
            &PartitionPlan::new(sizes.clone()),
            &mut prng,
        )?),
        CompareMethod::RandParM => Ok(random_partition(
            &single_set()?,
            &PartitionPlan::new(sizes.clone()),
            &mut prng,
        )?),
        CompareMethod::RandomUniform => {
            let pts = region.sample_uniform(n, &mut prng)?;
            let labels = sizes
                .iter()
                .enumerate()
                .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
                .collect();
            Ok(SlicedDesign::new(pts, labels, sizes.len())?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRecord {
    pub method: String,
    /// 1-based.
    pub replicate: usize,
    pub metric: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSummary {
    pub method: String,
    pub metric: &'static str,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub records: Vec<CompareRecord>,
    pub summary: Vec<CompareSummary>,
}

impl Comparison {
    pub fn median(&self, method: &str, metric: Metric) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.method == method && s.metric == metric.name())
            .map(|s| s.median)
    }
}

/// Every method on `replicates` replicates. Replicate `r` derives its seed
/// from `(seed, r)`; all methods of a replicate share one evaluation sample.
/// Replicates run in parallel with results identical to a serial run.
pub fn run_compare(
    cfg: &RunConfig,
    methods: &[CompareMethod],
    replicates: usize,
) -> Result<Comparison> {
    if replicates == 0 {
        return Err(CliError::Config("replicates must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(CliError::Config("no methods given".into()));
    }
    let moments = moments_for(cfg, cfg.seed())?;
    let jobs: Vec<(usize, CompareMethod)> = (1..=replicates)
        .flat_map(|r| methods.iter().map(move |&m| (r, m)))
        .collect();
    let reports: Vec<MetricsReport> = jobs
        .par_iter()
        .map(|&(r, method)| {
            let rep_seed = seed::derive(cfg.seed(), r as u64);
            let design = build_design(method, &cfg.region, &cfg.solver, seed::derive(rep_seed, method.stream()))?;
            let eval = eval_sample(&cfg.region, cfg.evaluation.eval_size, rep_seed)?;
            Ok(evaluate(&design, &eval, &moments)?)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(jobs.len() * Metric::ALL.len());
    for (&(r, method), report) in jobs.iter().zip(&reports) {
        for metric in Metric::ALL {
            records.push(CompareRecord {
                method: method.name().into(),
                replicate: r,
                metric: metric.name(),
                value: report.value(metric),
            });
        }
    }
    let mut summary = Vec::new();
    for method in methods {
        for metric in Metric::ALL {
            let values: Vec<f64> = records
                .iter()
                .filter(|rec| rec.method == method.name() && rec.metric == metric.name())
                .map(|rec| rec.value)
                .collect();
            let Summary { median, q1, q3, iqr } = metrics::summarize(&values).expect("replicates >= 1");
            summary.push(CompareSummary {
                method: method.name().into(),
                metric: metric.name(),
                median,
                q1,
                q3,
                iqr,
            });
        }
    }
    Ok(Comparison { records, summary })
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Runtime(format!("writing csv: {e}"))
}

pub fn write_records<W: Write>(records: &[CompareRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["method", "replicate", "metric", "value"]).map_err(csv_error)?;
    for rec in records {
        w.write_record([
            rec.method.clone(),
            rec.replicate.to_string(),
            rec.metric.to_string(),
            format_g17(rec.value),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Runtime(format!("writing csv: {e}")))
}

pub fn write_summary<W: Write>(summary: &[CompareSummary], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["method", "metric", "median", "q1", "q3", "iqr"]).map_err(csv_error)?;
    for s in summary {
        w.write_record([
            s.method.clone(),
            s.metric.to_string(),
            format_g17(s.median),
            format_g17(s.q1),
            format_g17(s.q3),
            format_g17(s.iqr),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Runtime(format!("writing csv: {e}")))
}

/// `smd compare`: long table to `out`, medians to `summary` or stdout.
pub fn cmd_compare(
    cfg: &RunConfig,
    methods: &[CompareMethod],
    replicates: usize,
    out: &Path,
    summary: Option<&Path>,
) -> Result<()> {
    let cmp = run_compare(cfg, methods, replicates)?;
    let file = std::fs::File::create(out).map_err(|e| CliError::io(out, e))?;
    write_records(&cmp.records, std::io::BufWriter::new(file))?;
    match summary {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            write_summary(&cmp.summary, std::io::BufWriter::new(file))
        }
        None => write_summary(&cmp.summary, std::io::stdout().lock()),
    }
}
