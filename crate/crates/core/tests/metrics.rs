mod common;

use common::*;
use proptest::prelude::*;
use smd_core::metrics::{evaluate, true_moments, MomentMode, MomentSpec};
use smd_core::region::Region;
use smd_core::{PointSet, SlicedDesign};

fn analytic(p: usize) -> MomentSpec {
    true_moments(&Region::simplex(p).unwrap(), MomentMode::Analytic, &mut rng(0)).unwrap()
}

#[test]
fn aggregates_are_full_plus_slice_terms() {
    let mut rng = rng(40);
    let region = Region::simplex(3).unwrap();
    for case in 0..30 {
        let d = random_design(&region, 6 + case, 1 + case % 4, &mut rng);
        let eval = region.sample_uniform(300, &mut rng).unwrap();
        let r = evaluate(&d, &eval, &analytic(3)).unwrap();
        let sum = |f: fn(&smd_core::metrics::SliceTerms) -> f64| f(&r.full) + r.slices.iter().map(f).sum::<f64>();
        assert!((r.delta_mu - sum(|t| t.delta_mu)).abs() <= 1e-12);
        assert!((r.delta_sigma - sum(|t| t.delta_sigma)).abs() <= 1e-12);
        assert!((r.rmsd - sum(|t| t.rmsd)).abs() <= 1e-12);
        assert!((r.mad - sum(|t| t.mad)).abs() <= 1e-12);
        assert!((r.mid - sum(|t| t.mid.unwrap_or(0.0))).abs() <= 1e-12);
    }
}

#[test]
fn rmsd_matches_direct_computation() {
    let mut rng = rng(41);
    let region = Region::simplex(3).unwrap();
    let d = random_design(&region, 12, 3, &mut rng);
    let eval = region.sample_uniform(200, &mut rng).unwrap();
    let r = evaluate(&d, &eval, &analytic(3)).unwrap();
    let nearest = |set: &PointSet| -> Vec<f64> {
        eval.iter().map(|u| set.iter().map(|x| dist(u, x)).fold(f64::INFINITY, f64::min)).collect()
    };
    let mut rmsd = 0.0;
    let mut mad = 0.0;
    for set in std::iter::once(d.points().clone()).chain(d.slices()) {
        let nn = nearest(&set);
        rmsd += (nn.iter().map(|v| v * v).sum::<f64>() / nn.len() as f64).sqrt();
        mad += nn.iter().cloned().fold(0.0, f64::max);
    }
    assert!((r.rmsd - rmsd).abs() < 1e-12);
    assert!((r.mad - mad).abs() < 1e-12);
}

#[test]
fn duplicate_point_gives_zero_slice_mid() {
    let pts = PointSet::from_rows(3, &[[0.2, 0.3, 0.5], [0.2, 0.3, 0.5], [0.6, 0.2, 0.2]]).unwrap();
    let d = SlicedDesign::new(pts, vec![0, 0, 1], 2).unwrap();
    let eval = PointSet::from_rows(3, &[[0.1, 0.1, 0.8]]).unwrap();
    let r = evaluate(&d, &eval, &analytic(3)).unwrap();
    assert_eq!(r.slices[0].mid, Some(0.0));
    assert_eq!(r.slices[1].mid, None);
    assert_eq!(r.flags, vec!["mid_undefined:slice_2".to_string()]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_a_point_to_every_slice_never_hurts_fill(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = rng(seed);
        let region = Region::simplex(3).unwrap();
        let d = random_design(&region, 3 * k, k, &mut rng);
        let eval = region.sample_uniform(200, &mut rng).unwrap();
        let before = evaluate(&d, &eval, &analytic(3)).unwrap();
        let mut pts = d.points().clone();
        let mut labels = d.labels().to_vec();
        let extra = region.sample_uniform(k, &mut rng).unwrap();
        for s in 0..k {
            pts.push(extra.row(s)).unwrap();
            labels.push(s);
        }
        let after = evaluate(&SlicedDesign::new(pts, labels, k).unwrap(), &eval, &analytic(3)).unwrap();
        prop_assert!(after.rmsd <= before.rmsd + 1e-12);
        prop_assert!(after.mad <= before.mad + 1e-12);
    }

    #[test]
    fn metrics_ignore_point_and_eval_order(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let region = Region::simplex(3).unwrap();
        let d = random_design(&region, 9, 3, &mut rng);
        let eval = region.sample_uniform(100, &mut rng).unwrap();
        let rev: Vec<usize> = (0..9).rev().collect();
        let labels: Vec<usize> = rev.iter().map(|&i| d.labels()[i]).collect();
        let d2 = SlicedDesign::new(d.points().select(&rev), labels, 3).unwrap();
        let erev: Vec<usize> = (0..100).rev().collect();
        let a = evaluate(&d, &eval, &analytic(3)).unwrap();
        let b = evaluate(&d2, &eval.select(&erev), &analytic(3)).unwrap();
        prop_assert!((a.delta_mu - b.delta_mu).abs() < 1e-12);
        prop_assert!((a.delta_sigma - b.delta_sigma).abs() < 1e-12);
        prop_assert!((a.rmsd - b.rmsd).abs() < 1e-12);
        prop_assert!((a.mad - b.mad).abs() < 1e-12);
        prop_assert!((a.mid - b.mid).abs() < 1e-12);
    }
}
