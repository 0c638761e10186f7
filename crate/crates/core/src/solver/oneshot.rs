use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::update::{init_points, mm_update_oneshot};
use super::{Driver, Method, SolveTrace, SolverConfig};
use crate::energy::objective_h;
use crate::region::Region;
use crate::{Error, Result, SlicedDesign};

/// One-shot construction: every slice is optimized jointly under the hybrid
/// criterion (`ComM` forces `lambda = 0`, decoupling the slices).
pub fn run_oneshot<R: Rng + ?Sized>(
    region: &Region,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<(SlicedDesign, SolveTrace)> {
    cfg.validate()?;
    let lambda = match cfg.method {
        Method::Mhed => cfg.lambda,
        Method::ComM => 0.0,
        m => {
            return Err(Error::InvalidConfig(format!(
                "{m} is a sequential method"
            )))
        }
    };
    let reference = region.sample_uniform(cfg.reference_size, rng)?;
    let n = cfg.total();
    let points = init_points(&reference, n, cfg.jitter, region, rng)?;

    let mut labels: Vec<usize> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| core::iter::repeat_n(k, s))
        .collect();
    if cfg.sizes.len() > 1 {
        labels.shuffle(rng);
    }
    let mut design = SlicedDesign::new(points, labels, cfg.sizes.len())?;

    let driver = Driver {
        reference: &reference,
        cfg,
        region,
        lambda,
    };
    let labels = design.labels().to_vec();
    let slices = design.num_slices();
    let (points, trace) = driver.run(
        design.points().clone(),
        &[],
        rng,
        |x, batch| {
            let d = SlicedDesign::new(x.clone(), labels.clone(), slices)?;
            mm_update_oneshot(&d, batch, lambda, region)
        },
        |x| {
            let d = SlicedDesign::new(x.clone(), labels.clone(), slices)?;
            objective_h(&d, &reference, lambda)
        },
    )?;
    design.set_points(points);
    Ok((design, trace))
}
