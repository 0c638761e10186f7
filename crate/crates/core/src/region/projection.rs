//! Euclidean projection onto regions.

use alloc::vec;
use alloc::vec::Vec;

use super::{LinearRow, Region, RegionKind, MAX_PROJECTION_CYCLES, PROJECTION_TOL};
use crate::points::{dot, squared_distance};
use crate::{Error, Result};

impl Region {
    /// Euclidean-nearest point of the region.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("cannot project a non-finite point".into()));
        }
        match self.kind() {
            RegionKind::StandardSimplex => Ok(onto_simplex(x)),
            RegionKind::BoundedSimplex { lower, upper } => {
                Ok(onto_capped_simplex(x, lower, upper))
            }
            RegionKind::LinearPolytope { .. } => {
                let c = self.constraints();
                let mut y = x.to_vec();
                c.project_affine(&mut y);
                if c.halfspaces.iter().all(|h| h.residual(&y) <= 0.0) {
                    return Ok(y);
                }
                dykstra(&y, &c.halfspaces, &c.eq_basis, PROJECTION_TOL, MAX_PROJECTION_CYCLES)
            }
        }
    }
}

/// Projection onto `{x >= 0, sum x = 1}` by sorting and thresholding.
pub(crate) fn onto_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

/// Projection onto `{lower <= x <= upper, sum x = 1}`.
///
/// The solution is `clamp(v - theta, lower, upper)` for the unique shift
/// `theta` that makes the coordinates sum to one. The sum is piecewise linear
/// and nonincreasing in `theta` with breakpoints at `v - upper` and
/// `v - lower`, so `theta` is found exactly by locating the bracketing pair of
/// breakpoints and interpolating.
pub(crate) fn onto_capped_simplex(v: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    let clamped_sum = |theta: f64| -> f64 {
        v.iter()
            .zip(lower.iter().zip(upper))
            .map(|(&vi, (&l, &u))| (vi - theta).clamp(l, u))
            .sum()
    };
    let mut breakpoints: Vec<f64> = v
        .iter()
        .zip(lower.iter().zip(upper))
        .flat_map(|(&vi, (&l, &u))| [vi - u, vi - l])
        .collect();
    breakpoints.sort_unstable_by(|a, b| a.total_cmp(b));

    let mut theta = *breakpoints.last().unwrap();
    let mut prev: Option<(f64, f64)> = None;
    for &b in &breakpoints {
        let s = clamped_sum(b);
        if s <= 1.0 {
            theta = match prev {
                Some((pb, ps)) if ps > s => pb + (ps - 1.0) / (ps - s) * (b - pb),
                Some((pb, _)) => pb,
                None => b,
            };
            break;
        }
        prev = Some((b, s));
    }
    v.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&vi, (&l, &u))| (vi - theta).clamp(l, u))
        .collect()
}

fn project_halfspace(x: &mut [f64], h: &LinearRow) {
    let r = dot(&h.coef, x) - h.rhs;
    if r > 0.0 {
        for (xi, c) in x.iter_mut().zip(&h.coef) {
            *xi -= r * c;
        }
    }
}

/// Dykstra's alternating projections onto the intersection of the affine set
/// spanned by the orthonormal `eq_basis` and the unit-normal `halfspaces`.
/// Converges to the nearest point, not just some feasible point.
pub(crate) fn dykstra(
    start: &[f64],
    halfspaces: &[LinearRow],
    eq_basis: &[LinearRow],
    tol: f64,
    max_cycles: usize,
) -> Result<Vec<f64>> {
    let p = start.len();
    let project_affine = |x: &mut [f64]| {
        for q in eq_basis {
            let r = dot(&q.coef, x) - q.rhs;
            for (xi, c) in x.iter_mut().zip(&q.coef) {
                *xi -= r * c;
            }
        }
    };
    let mut x = start.to_vec();
    project_affine(&mut x);
    // correction terms, one per half-space; the affine set needs none
    let mut corrections = vec![vec![0.0; p]; halfspaces.len()];
    let mut y = vec![0.0; p];
    for _ in 0..max_cycles {
        let before = x.clone();
        for (h, corr) in halfspaces.iter().zip(corrections.iter_mut()) {
            for i in 0..p {
                y[i] = x[i] + corr[i];
            }
            x.copy_from_slice(&y);
            project_halfspace(&mut x, h);
            for i in 0..p {
                corr[i] = y[i] - x[i];
            }
        }
        project_affine(&mut x);
        let moved = squared_distance(&before, &x);
        if moved < tol * tol && halfspaces.iter().all(|h| dot(&h.coef, &x) - h.rhs <= tol) {
            return Ok(x);
        }
    }
    Err(Error::ProjectionDidNotConverge { cycles: max_cycles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::MEMBERSHIP_TOL;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn simplex_examples() {
        let t3 = Region::simplex(3).unwrap();
        assert!(close(&t3.project(&[0.6, 0.6, 0.6]).unwrap(), &[1.0 / 3.0; 3], 1e-15));
        assert!(close(&t3.project(&[0.5, 0.3, 0.2]).unwrap(), &[0.5, 0.3, 0.2], 1e-12));
        let t2 = Region::simplex(2).unwrap();
        assert!(close(&t2.project(&[1.4, -0.4]).unwrap(), &[1.0, 0.0], 1e-15));
    }

    #[test]
    fn segment_projection_matches_grid_search() {
        // oracle: brute force over {(t, 1-t)}
        let x = [1.4, -0.4];
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=100_000 {
            let t = i as f64 / 100_000.0;
            let d = (x[0] - t).powi(2) + (x[1] - 1.0 + t).powi(2);
            if d < best.0 {
                best = (d, t);
            }
        }
        assert_eq!(best.1, 1.0);
    }

    #[test]
    fn capped_projection_hits_bounds() {
        let r = Region::bounded(vec![0.1, 0.05, 0.15], vec![0.8, 0.6, 0.7]).unwrap();
        let y = r.project(&[1.0, 0.0, 0.0]).unwrap();
        assert!(close(&y, &[0.8, 0.05, 0.15], 1e-12), "{y:?}");
        assert!(r.contains(&y, MEMBERSHIP_TOL).unwrap());
    }

    #[test]
    fn capped_reduces_to_simplex_with_trivial_bounds() {
        let v = [0.9, -0.3, 0.7, 0.1];
        let a = onto_simplex(&v);
        let b = onto_capped_simplex(&v, &[0.0; 4], &[1.0; 4]);
        assert!(close(&a, &b, 1e-15));
    }

    #[test]
    fn polytope_projection_agrees_with_bounded() {
        let lower = [0.1, 0.05, 0.15];
        let upper = [0.8, 0.6, 0.7];
        let bounded = Region::bounded(lower.to_vec(), upper.to_vec()).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..3 {
            let mut row = vec![0.0; 3];
            row[i] = 1.0;
            a.extend_from_slice(&row);
            b.push(upper[i]);
            row[i] = -1.0;
            a.extend_from_slice(&row);
            b.push(-lower[i]);
        }
        let poly = Region::polytope(3, a, b, vec![], vec![]).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.3, 0.2], [0.4, 0.3, 0.3]] {
            let pb = bounded.project(&x).unwrap();
            let pp = poly.project(&x).unwrap();
            assert!(close(&pb, &pp, 1e-8), "{pb:?} vs {pp:?}");
        }
    }

    #[test]
    fn degenerate_bounded_projects_to_point() {
        let r = Region::bounded(vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]).unwrap();
        let y = r.project(&[0.9, 0.0, 0.1]).unwrap();
        assert!(close(&y, &[0.2, 0.3, 0.5], 1e-12));
    }
}
