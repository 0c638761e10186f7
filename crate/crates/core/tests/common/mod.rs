#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use smd_core::region::Region;
use smd_core::{PointSet, SlicedDesign};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Textbook triple-loop energy distance between two samples.
pub fn naive_energy(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let (n, m) = (x.len() as f64, y.len() as f64);
    let mut xy = 0.0;
    for a in x {
        for b in y {
            xy += dist(a, b);
        }
    }
    let mut xx = 0.0;
    for a in x {
        for b in x {
            xx += dist(a, b);
        }
    }
    let mut yy = 0.0;
    for a in y {
        for b in y {
            yy += dist(a, b);
        }
    }
    2.0 * xy / (n * m) - xx / (n * n) - yy / (m * m)
}

pub fn rows(p: &PointSet) -> Vec<Vec<f64>> {
    p.iter().map(|r| r.to_vec()).collect()
}

/// Labels with every slice nonempty, in random order.
pub fn random_labels<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    labels.shuffle(rng);
    labels
}

pub fn random_design<R: Rng>(region: &Region, n: usize, k: usize, rng: &mut R) -> SlicedDesign {
    let pts = region.sample_uniform(n, rng).unwrap();
    SlicedDesign::new(pts, random_labels(n, k, rng), k).unwrap()
}

/// Objective of the one-shot solver, summed pair by pair.
pub fn h(design: &SlicedDesign, y: &PointSet, lambda: f64) -> f64 {
    let pts = design.points();
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
            total -= pair_weight(design, i, j, lambda) * dist(pts.row(i), pts.row(j));
        }
    }
    total
}

pub fn pair_weight(design: &SlicedDesign, i: usize, j: usize, lambda: f64) -> f64 {
    let n = design.len() as f64;
    let (a, b) = (design.labels()[i], design.labels()[j]);
    let mut w = lambda / (n * n);
    if a == b {
        w += (1.0 - lambda) / (n * design.sizes()[a] as f64);
    }
    w
}

/// Quadratic majorizer of `h` at `at`: attraction bounded through
/// `d <= (d^2 + d_t^2) / (2 d_t)`, repulsion linearized by Cauchy-Schwarz.
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

/// Sequential-stage majorizer of `objective_h_seq` at `pk_t`.
pub fn surrogate_seq(x: &PointSet, pk_t: &PointSet, pc: &PointSet, y: &PointSet, lambda_k: f64) -> f64 {
    let nk = pk_t.len() as f64;
    let nc = pc.len() as f64;
    let big_n = y.len() as f64;
    let share = if pc.is_empty() { 0.0 } else { lambda_k * nc / (nc + nk) };
    let lin = |a: &[f64], b: &[f64], ta: &[f64], tb: &[f64]| {
        let dt = dist(ta, tb);
        (0..a.len()).map(|c| (a[c] - b[c]) * (ta[c] - tb[c])).sum::<f64>() / dt
    };
    let mut total = 0.0;
    for i in 0..pk_t.len() {
        for u in y {
            let dt = dist(pk_t.row(i), u);
            let d = dist(x.row(i), u);
            total += 2.0 / (nk * big_n) * (d * d + dt * dt) / (2.0 * dt);
        }
        for j in 0..pk_t.len() {
            if i != j {
                total -= (1.0 - share) / (nk * nk) * lin(x.row(i), x.row(j), pk_t.row(i), pk_t.row(j));
            }
        }
        for c in pc {
            total -= 2.0 * lambda_k / ((nc + nk) * nk) * lin(x.row(i), c, pk_t.row(i), c);
        }
    }
    total
}

/// Central-difference gradient of `f` at `x`, step `step`.
pub fn numeric_gradient<F: Fn(&PointSet) -> f64>(f: F, x: &PointSet, step: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.as_flat().len());
    for idx in 0..x.as_flat().len() {
        let mut plus = x.clone().into_flat();
        let mut minus = plus.clone();
        plus[idx] += step;
        minus[idx] -= step;
        let fp = f(&PointSet::from_flat(x.dim(), plus).unwrap());
        let fm = f(&PointSet::from_flat(x.dim(), minus).unwrap());
        g.push((fp - fm) / (2.0 * step));
    }
    g
}
