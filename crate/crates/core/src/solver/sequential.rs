use alloc::vec::Vec;

use rand::Rng;

use super::update::{init_points, mm_update_sequential};
use super::{Driver, LambdaSchedule, Method, SolveTrace, SolverConfig};
use crate::energy::objective_h_seq;
use crate::region::Region;
use crate::{Error, PointSet, Result, SlicedDesign};

/// Weight that gives the accumulated set and the current subset equal say
/// in the update direction: `(n_c + n_k) / (2 n_c)`, clamped to `[0, 1]`,
/// and 1 for the first stage.
pub fn default_lambda_k(n_c: usize, n_k: usize) -> f64 {
    if n_c == 0 {
        return 1.0;
    }
    ((n_c + n_k) as f64 / (2.0 * n_c as f64)).clamp(0.0, 1.0)
}

fn stage_order(cfg: &SolverConfig) -> Vec<usize> {
    match &cfg.stage_order {
        Some(order) => order.clone(),
        None => {
            let mut order: Vec<usize> = (0..cfg.sizes.len()).collect();
            order.sort_by_key(|&k| cfg.sizes[k]);
            order
        }
    }
}

/// Sequential construction: slices are built one at a time, each repelled by
/// the points already placed. Points appear in stage order; labels keep the
/// caller's slice indices. One trace per stage.
pub fn run_sequential<R: Rng + ?Sized>(
    region: &Region,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<(SlicedDesign, Vec<SolveTrace>)> {
    cfg.validate()?;
    if !cfg.method.is_sequential() {
        return Err(Error::InvalidConfig(alloc::format!(
            "{} is a one-shot method",
            cfg.method
        )));
    }
    let reference = region.sample_uniform(cfg.reference_size, rng)?;
    let mut accumulated = PointSet::with_capacity(region.dim(), cfg.total());
    let mut labels = Vec::with_capacity(cfg.total());
    let mut traces = Vec::with_capacity(cfg.sizes.len());

    for k in stage_order(cfg) {
        let nk = cfg.sizes[k];
        let nc = accumulated.len();
        let lambda_k = match (cfg.method, cfg.lambda_schedule) {
            (Method::SeqM, _) => 1.0,
            (_, _) if nc == 0 => 1.0,
            (_, LambdaSchedule::Fixed(l)) => l,
            (_, LambdaSchedule::Balanced) => default_lambda_k(nc, nk),
        };
        let init = init_points(&reference, nk, cfg.jitter, region, rng)?;
        let driver = Driver {
            reference: &reference,
            cfg,
            region,
            lambda: lambda_k,
        };
        let pc = &accumulated;
        let (points, mut trace) = driver.run(
            init,
            &[pc],
            rng,
            |x, batch| mm_update_sequential(x, pc, batch, lambda_k, region),
            |x| objective_h_seq(x, pc, &reference, lambda_k),
        )?;
        trace.slice = Some(k);
        accumulated.extend_from(&points)?;
        labels.extend(core::iter::repeat_n(k, nk));
        traces.push(trace);
    }
    let design = SlicedDesign::new(accumulated, labels, cfg.sizes.len())?;
    Ok((design, traces))
}
