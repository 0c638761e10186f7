//! Brute-force evaluators written independently of the library.

use smd_core::{PointSet, SlicedDesign};

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Triple-loop energy distance between two samples.
pub fn naive_energy(x: &PointSet, y: &PointSet) -> f64 {
    let mean = |a: &PointSet, b: &PointSet| {
        let mut s = 0.0;
        for u in a {
            for v in b {
                s += dist(u, v);
            }
        }
        s / (a.len() * b.len()) as f64
    };
    2.0 * mean(x, y) - mean(x, x) - mean(y, y)
}

fn pair_weight(d: &SlicedDesign, i: usize, j: usize, lambda: f64) -> f64 {
    let n = d.len() as f64;
    let (a, b) = (d.labels()[i], d.labels()[j]);
    let mut w = lambda / (n * n);
    if a == b {
        w += (1.0 - lambda) / (n * d.sizes()[a] as f64);
    }
    w
}

/// One-shot objective summed over ordered pairs.
pub fn h(d: &SlicedDesign, y: &PointSet, lambda: f64) -> f64 {
    let pts = d.points();
    let n = pts.len() as f64;
    let big_n = y.len() as f64;
    let mut total = 0.0;
    for x in pts {
        for u in y {
            total += 2.0 / (n * big_n) * dist(x, u);
        }
    }
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            total -= pair_weight(d, i, j, lambda) * dist(pts.row(i), pts.row(j));
        }
    }
    total
}

/// Majorizer of `h` at `at`, evaluated at the points `x` (same labels).
pub fn surrogate(x: &PointSet, at: &SlicedDesign, y: &PointSet, lambda: f64) -> f64 {
    let t = at.points();
    let n = t.len() as f64;
    let big_n = y.len() as f64;
    let mut total = 0.0;
    for i in 0..t.len() {
        for u in y {
            let dt = dist(t.row(i), u);
            let d = dist(x.row(i), u);
            total += 2.0 / (n * big_n) * (d * d + dt * dt) / (2.0 * dt);
        }
    }
    for i in 0..t.len() {
        for j in 0..t.len() {
            if i == j {
                continue;
            }
            let dt = dist(t.row(i), t.row(j));
            let dot: f64 = (0..t.dim())
                .map(|c| (x.row(i)[c] - x.row(j)[c]) * (t.row(i)[c] - t.row(j)[c]))
                .sum();
            total -= pair_weight(at, i, j, lambda) * dot / dt;
        }
    }
    total
}

pub fn numeric_gradient<F: Fn(&PointSet) -> f64>(f: F, x: &PointSet, step: f64) -> Vec<f64> {
    (0..x.as_flat().len())
        .map(|idx| {
            let mut plus = x.as_flat().to_vec();
            let mut minus = plus.clone();
            plus[idx] += step;
            minus[idx] -= step;
            let fp = f(&PointSet::from_flat(x.dim(), plus).unwrap());
            let fm = f(&PointSet::from_flat(x.dim(), minus).unwrap());
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

/// Partition objective minimized over every split of `points` into
/// slices of sizes `n0` and `n - n0`.
pub fn best_two_way_split(points: &PointSet, n0: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n0 {
            continue;
        }
        let labels: Vec<usize> = (0..n).map(|i| if mask >> i & 1 == 1 { 0 } else { 1 }).collect();
        let d = SlicedDesign::new(points.clone(), labels, 2).unwrap();
        best = best.min(split_objective(&d));
    }
    best
}

/// `sum_k n_k/n E(F_P, F_Pk)` from naive energies.
pub fn split_objective(d: &SlicedDesign) -> f64 {
    let n = d.len() as f64;
    d.slices()
        .iter()
        .map(|s| s.len() as f64 / n * naive_energy(d.points(), s))
        .sum()
}
