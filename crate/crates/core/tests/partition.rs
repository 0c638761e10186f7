mod common;

use std::collections::HashMap;

use common::*;
use smd_core::partition::{
    energy_partition, partition_objective, partition_objective_pairwise, random_partition,
    PartitionPlan,
};
use smd_core::region::Region;
use smd_core::{PointSet, SlicedDesign};

/// Minimum objective over all two-slice splits with slice 0 of size `n0`.
fn brute_force(points: &PointSet, n0: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n0 {
            continue;
        }
        let labels: Vec<usize> = (0..n).map(|i| if mask >> i & 1 == 1 { 0 } else { 1 }).collect();
        let d = SlicedDesign::new(points.clone(), labels, 2).unwrap();
        best = best.min(partition_objective(&d).unwrap());
    }
    best
}

#[test]
fn random_partition_is_uniform_over_splits() {
    let pts = PointSet::from_rows(1, &[[0.0], [1.0], [2.0], [3.0]]).unwrap();
    let plan = PartitionPlan::new(vec![2, 2]);
    let mut rng = rng(30);
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    let draws = 100_000;
    for _ in 0..draws {
        let d = random_partition(&pts, &plan, &mut rng).unwrap();
        // unordered split, keyed by the slice of point 0
        let key: Vec<usize> = d.labels().iter().map(|&l| (l != d.labels()[0]) as usize).collect();
        *counts.entry(key).or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    // each unordered split covers two of the six labelings
    for (_, c) in counts {
        let f = c as f64 / draws as f64;
        assert!((f - 1.0 / 3.0).abs() < 0.02, "{f}");
    }
}

#[test]
fn random_partition_labelings_each_one_sixth() {
    let pts = PointSet::from_rows(1, &[[0.0], [1.0], [2.0], [3.0]]).unwrap();
    let plan = PartitionPlan::new(vec![2, 2]);
    let mut rng = rng(31);
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    let draws = 100_000;
    for _ in 0..draws {
        let d = random_partition(&pts, &plan, &mut rng).unwrap();
        *counts.entry(d.labels().to_vec()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    for (_, c) in counts {
        assert!((c as f64 / draws as f64 - 1.0 / 6.0).abs() < 0.02);
    }
}

#[test]
fn objective_forms_agree_on_random_designs() {
    let mut rng = rng(32);
    let region = Region::simplex(3).unwrap();
    for case in 0..50 {
        let d = random_design(&region, 5 + case, 1 + case % 5, &mut rng);
        let a = partition_objective(&d).unwrap();
        let b = partition_objective_pairwise(&d).unwrap();
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn near_brute_force_optimum_on_small_instances() {
    let mut rng = rng(33);
    let region = Region::simplex(3).unwrap();
    for case in 0..50 {
        let n = 6 + case % 7;
        let n0 = 1 + case % (n - 1);
        let pts = region.sample_uniform(n, &mut rng).unwrap();
        let d = energy_partition(&pts, &PartitionPlan::new(vec![n0, n - n0]), &mut rng).unwrap();
        let got = partition_objective(&d).unwrap();
        let best = brute_force(&pts, n0);
        assert!(got <= best * 1.05 + 1e-12, "case {case}: {got} vs {best}");
    }
}

#[test]
fn beats_median_random_partition() {
    let mut rng = rng(34);
    let region = Region::simplex(3).unwrap();
    let pts = region.sample_uniform(12, &mut rng).unwrap();
    let plan = PartitionPlan::new(vec![4, 8]);
    let got = partition_objective(&energy_partition(&pts, &plan, &mut rng).unwrap()).unwrap();
    let mut random: Vec<f64> = (0..200)
        .map(|_| partition_objective(&random_partition(&pts, &plan, &mut rng).unwrap()).unwrap())
        .collect();
    random.sort_by(f64::total_cmp);
    assert!(got <= random[100]);
}

#[test]
fn label_permutation_permutes_output() {
    let mut rng_a = rng(35);
    let region = Region::simplex(3).unwrap();
    let pts = region.sample_uniform(20, &mut rng_a).unwrap();
    let a = energy_partition(&pts, &PartitionPlan::new(vec![5, 15]), &mut rng(9)).unwrap();
    let b = energy_partition(&pts, &PartitionPlan::new(vec![15, 5]), &mut rng(9)).unwrap();
    let swapped: Vec<usize> = a.labels().iter().map(|&l| 1 - l).collect();
    assert_eq!(b.labels(), swapped.as_slice());
}

#[test]
fn slices_cover_input_exactly() {
    let mut rng = rng(36);
    let region = Region::simplex(4).unwrap();
    let pts = region.sample_uniform(40, &mut rng).unwrap();
    let d = energy_partition(&pts, &PartitionPlan::new(vec![10, 10, 20]), &mut rng).unwrap();
    assert_eq!(d.points(), &pts);
    assert_eq!(d.sizes(), &[10, 10, 20]);
}
