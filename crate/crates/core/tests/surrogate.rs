mod common;

use common::*;
use smd_core::energy::{objective_h, objective_h_seq};
use smd_core::region::Region;
use smd_core::solver::{mm_update_sequential, oneshot_targets, sequential_targets};
use smd_core::{PointSet, SlicedDesign};

#[test]
fn surrogate_majorizes_and_touches() {
    let mut rng = rng(20);
    let region = Region::simplex(3).unwrap();
    for case in 0..100 {
        let at = random_design(&region, 8, 2, &mut rng);
        let y = region.sample_uniform(60, &mut rng).unwrap();
        let lambda = (case % 11) as f64 / 10.0;
        let d = at.with_points(region.sample_uniform(8, &mut rng).unwrap()).unwrap();
        let g = surrogate(d.points(), &at, &y, lambda);
        assert!(g >= h(&d, &y, lambda) - 1e-10);
        let touch = surrogate(at.points(), &at, &y, lambda);
        assert!((touch - objective_h(&at, &y, lambda).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn oneshot_update_is_the_surrogate_minimizer() {
    let mut rng = rng(21);
    let region = Region::simplex(3).unwrap();
    for case in 0..20 {
        let at = random_design(&region, 9, 3, &mut rng);
        let y = region.sample_uniform(80, &mut rng).unwrap();
        let lambda = case as f64 / 19.0;
        let x = oneshot_targets(&at, &y, lambda).unwrap();
        let grad = numeric_gradient(|z| surrogate(z, &at, &y, lambda), &x, 1e-6);
        let worst = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        assert!(worst < 1e-4, "case {case}: gradient {worst}");
    }
}

#[test]
fn sequential_surrogate_majorizes_and_update_minimizes() {
    let mut rng = rng(22);
    let region = Region::simplex(3).unwrap();
    for case in 0..20 {
        let pk = region.sample_uniform(6, &mut rng).unwrap();
        let pc = match case % 7 * 2 {
            0 => PointSet::new(3),
            m => region.sample_uniform(m, &mut rng).unwrap(),
        };
        let y = region.sample_uniform(80, &mut rng).unwrap();
        let lambda_k = case as f64 / 19.0;
        let other = region.sample_uniform(6, &mut rng).unwrap();
        let g = surrogate_seq(&other, &pk, &pc, &y, lambda_k);
        assert!(g >= objective_h_seq(&other, &pc, &y, lambda_k).unwrap() - 1e-10);
        let touch = surrogate_seq(&pk, &pk, &pc, &y, lambda_k);
        assert!((touch - objective_h_seq(&pk, &pc, &y, lambda_k).unwrap()).abs() <= 1e-10);

        let x = sequential_targets(&pk, &pc, &y, lambda_k).unwrap();
        let grad = numeric_gradient(|z| surrogate_seq(z, &pk, &pc, &y, lambda_k), &x, 1e-6);
        let worst = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        assert!(worst < 1e-4, "case {case}: gradient {worst}");
    }
}

#[test]
fn sequential_step_decreases_stage_objective() {
    let mut rng = rng(23);
    let region = Region::simplex(3).unwrap();
    for _ in 0..10 {
        let pk = region.sample_uniform(6, &mut rng).unwrap();
        let pc = region.sample_uniform(10, &mut rng).unwrap();
        let y = region.sample_uniform(300, &mut rng).unwrap();
        let before = objective_h_seq(&pk, &pc, &y, 0.5).unwrap();
        let step = mm_update_sequential(&pk, &pc, &y, 0.5, &region).unwrap();
        let after = objective_h_seq(&step.points, &pc, &y, 0.5).unwrap();
        assert!(after < before);
    }
}

#[test]
fn single_slice_update_ignores_lambda() {
    let mut rng = rng(24);
    let region = Region::simplex(3).unwrap();
    let d = SlicedDesign::unsliced(region.sample_uniform(7, &mut rng).unwrap());
    let y = region.sample_uniform(50, &mut rng).unwrap();
    let a = oneshot_targets(&d, &y, 0.0).unwrap();
    let b = oneshot_targets(&d, &y, 1.0).unwrap();
    for (u, v) in a.as_flat().iter().zip(b.as_flat()) {
        assert!((u - v).abs() < 1e-14);
    }
}

#[test]
fn steps_from_reference_points_descend() {
    let mut rng = rng(25);
    let region = Region::simplex(3).unwrap();
    let mut stayed = 0;
    for case in 0..200 {
        let y = region.sample_uniform(40, &mut rng).unwrap();
        let mut pts = region.sample_uniform(6, &mut rng).unwrap();
        for i in 0..1 + case % 3 {
            pts.row_mut(i).copy_from_slice(y.row(i));
        }
        let d = SlicedDesign::new(pts, vec![0, 1, 0, 1, 0, 1], 2).unwrap();
        let lambda = (case % 5) as f64 / 4.0;
        let x = oneshot_targets(&d, &y, lambda).unwrap();
        if x.row(0) == y.row(0) {
            stayed += 1;
        }
        let after = d.with_points(x).unwrap();
        assert!(h(&after, &y, lambda) <= h(&d, &y, lambda) + 1e-12, "case {case}");
        assert!(objective_h(&after, &y, lambda).unwrap() <= objective_h(&d, &y, lambda).unwrap() + 1e-12);
    }
    assert!(stayed < 200);
}
