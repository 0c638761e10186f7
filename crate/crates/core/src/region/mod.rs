//! Mixture experimental regions.
//!
//! Three shapes are supported: the standard simplex `T_p`, the simplex with
//! per-component bounds, and a general polytope `{Ax <= b, Cx = d}`
//! intersected with `T_p`. All of them are handled through one linear
//! constraint system; the shape only selects the fastest exact projection and
//! the cheapest exact sampler.

mod grid;
mod projection;
mod sampling;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use grid::ProcessGrid;
pub use sampling::HitAndRun;

use crate::points::{dot, norm};
use crate::{Error, Result};

/// Membership tolerance used throughout the crate.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Movement threshold at which iterative projection stops.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Minimum normalized slack of a strictly interior point.
pub const STRICT_SLACK: f64 = 1e-6;

const MAX_PROJECTION_CYCLES: usize = 100_000;

/// Geometric description of the region, as given by the caller.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegionKind {
    StandardSimplex,
    BoundedSimplex {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Row-major `m x p` inequality matrix and `r x p` equality matrix. The
    /// equality system always contains the sum-to-one row.
    LinearPolytope {
        ineq_matrix: Vec<f64>,
        ineq_rhs: Vec<f64>,
        eq_matrix: Vec<f64>,
        eq_rhs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LinearRow {
    pub coef: Vec<f64>,
    pub rhs: f64,
}

impl LinearRow {
    fn residual(&self, x: &[f64]) -> f64 {
        dot(&self.coef, x) - self.rhs
    }
}

/// The region as one linear system. `ineq`/`eq` are the rows as written
/// (used for membership); `halfspaces` carry unit normals and `eq_basis` is
/// an orthonormal basis of the equality rows with transformed right-hand
/// sides.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Constraints {
    pub ineq: Vec<LinearRow>,
    pub eq: Vec<LinearRow>,
    pub halfspaces: Vec<LinearRow>,
    pub eq_basis: Vec<LinearRow>,
}

impl Constraints {
    fn build(dim: usize, ineq: Vec<LinearRow>, eq: Vec<LinearRow>) -> Result<Self> {
        let mut halfspaces = Vec::with_capacity(ineq.len());
        for row in &ineq {
            let len = norm(&row.coef);
            if len < 1e-14 {
                if row.rhs < 0.0 {
                    return Err(Error::InfeasibleRegion);
                }
                continue;
            }
            halfspaces.push(LinearRow {
                coef: row.coef.iter().map(|c| c / len).collect(),
                rhs: row.rhs / len,
            });
        }
        let eq_basis = orthonormalize(dim, &[], &eq)?;
        Ok(Self {
            ineq,
            eq,
            halfspaces,
            eq_basis,
        })
    }

    /// Exact projection onto the affine hull of the equality rows.
    pub fn project_affine(&self, x: &mut [f64]) {
        for q in &self.eq_basis {
            let r = q.residual(x);
            for (xi, qi) in x.iter_mut().zip(&q.coef) {
                *xi -= r * qi;
            }
        }
    }

    /// Smallest normalized inequality slack at `x`.
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| -h.residual(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Gram-Schmidt over `rows` (with their right-hand sides), starting from an
/// existing orthonormal `basis`. Dependent rows are dropped when consistent.
pub(crate) fn orthonormalize(
    dim: usize,
    basis: &[LinearRow],
    rows: &[LinearRow],
) -> Result<Vec<LinearRow>> {
    let mut out: Vec<LinearRow> = basis.to_vec();
    for row in rows {
        if row.coef.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.coef.len(),
            });
        }
        let mut coef = row.coef.clone();
        let mut rhs = row.rhs;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &out {
                let a = dot(&q.coef, &coef);
                for (c, qc) in coef.iter_mut().zip(&q.coef) {
                    *c -= a * qc;
                }
                rhs -= a * q.rhs;
            }
        }
        let len = norm(&coef);
        let scale = norm(&row.coef).max(1.0);
        if len < 1e-10 * scale {
            if rhs.abs() > 1e-9 * scale {
                return Err(Error::InfeasibleRegion);
            }
            continue;
        }
        out.push(LinearRow {
            coef: coef.iter().map(|c| c / len).collect(),
            rhs: rhs / len,
        });
    }
    Ok(out)
}

/// A feasible starting point for hit-and-run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteriorPoint {
    pub point: Vec<f64>,
    /// Every inequality has normalized slack of at least [`STRICT_SLACK`].
    pub strict: bool,
    pub min_slack: f64,
}

/// A mixture experimental region. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    kind: RegionKind,
    constraints: Constraints,
    interior: InteriorPoint,
}

impl Region {
    /// The standard simplex `T_p`.
    pub fn simplex(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidRegion("p must be positive".into()));
        }
        Self::finish(p, RegionKind::StandardSimplex)
    }

    /// `T_p` with `lower <= x <= upper` componentwise.
    pub fn bounded(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let p = lower.len();
        if p == 0 {
            return Err(Error::InvalidRegion("p must be positive".into()));
        }
        if upper.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: upper.len(),
            });
        }
        for i in 0..p {
            let (l, u) = (lower[i], upper[i]);
            if !(l.is_finite() && u.is_finite()) || !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&u)
            {
                return Err(Error::InvalidRegion(alloc::format!(
                    "bounds of component {} must lie in [0, 1]",
                    i + 1
                )));
            }
            if l > u {
                return Err(Error::InvalidRegion(alloc::format!(
                    "lower bound exceeds upper bound for component {}",
                    i + 1
                )));
            }
        }
        let lo: f64 = crate::sum::sum(lower.iter().copied());
        let hi: f64 = crate::sum::sum(upper.iter().copied());
        if lo > 1.0 + 1e-12 || hi < 1.0 - 1e-12 {
            return Err(Error::InfeasibleRegion);
        }
        Self::finish(p, RegionKind::BoundedSimplex { lower, upper })
    }

    /// `{x in T_p : Ax <= b, Cx = d}` with row-major `A` (`m x p`) and `C`
    /// (`r x p`). The sum-to-one row is appended to `C` when missing and the
    /// nonnegativity constraints of `T_p` are always enforced.
    pub fn polytope(
        p: usize,
        ineq_matrix: Vec<f64>,
        ineq_rhs: Vec<f64>,
        mut eq_matrix: Vec<f64>,
        mut eq_rhs: Vec<f64>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidRegion("p must be positive".into()));
        }
        check_matrix("A", p, &ineq_matrix, &ineq_rhs)?;
        check_matrix("C", p, &eq_matrix, &eq_rhs)?;
        let has_sum_row = eq_matrix.chunks_exact(p).zip(&eq_rhs).any(|(row, &d)| {
            let c = row[0];
            c != 0.0 && row.iter().all(|&v| v == c) && (d / c - 1.0).abs() < 1e-12
        });
        if !has_sum_row {
            eq_matrix.extend(core::iter::repeat(1.0).take(p));
            eq_rhs.push(1.0);
        }
        Self::finish(
            p,
            RegionKind::LinearPolytope {
                ineq_matrix,
                ineq_rhs,
                eq_matrix,
                eq_rhs,
            },
        )
    }

    fn finish(dim: usize, kind: RegionKind) -> Result<Self> {
        let mut ineq = Vec::new();
        let unit = |i: usize, s: f64| {
            let mut c = vec![0.0; dim];
            c[i] = s;
            c
        };
        match &kind {
            RegionKind::StandardSimplex => {}
            RegionKind::BoundedSimplex { lower, upper } => {
                for i in 0..dim {
                    ineq.push(LinearRow {
                        coef: unit(i, 1.0),
                        rhs: upper[i],
                    });
                    ineq.push(LinearRow {
                        coef: unit(i, -1.0),
                        rhs: -lower[i],
                    });
                }
            }
            RegionKind::LinearPolytope {
                ineq_matrix,
                ineq_rhs,
                ..
            } => {
                for (row, &b) in ineq_matrix.chunks_exact(dim).zip(ineq_rhs) {
                    ineq.push(LinearRow {
                        coef: row.to_vec(),
                        rhs: b,
                    });
                }
            }
        }
        // nonnegativity; redundant for bounded shapes with lower >= 0 but
        // harmless, and it keeps every region inside T_p.
        if !matches!(kind, RegionKind::BoundedSimplex { .. }) {
            for i in 0..dim {
                ineq.push(LinearRow {
                    coef: unit(i, -1.0),
                    rhs: 0.0,
                });
            }
        }
        let eq = match &kind {
            RegionKind::LinearPolytope {
                eq_matrix, eq_rhs, ..
            } => eq_matrix
                .chunks_exact(dim)
                .zip(eq_rhs)
                .map(|(row, &d)| LinearRow {
                    coef: row.to_vec(),
                    rhs: d,
                })
                .collect(),
            _ => vec![LinearRow {
                coef: vec![1.0; dim],
                rhs: 1.0,
            }],
        };
        let constraints = Constraints::build(dim, ineq, eq)?;
        let mut region = Region {
            dim,
            kind,
            constraints,
            interior: InteriorPoint {
                point: Vec::new(),
                strict: false,
                min_slack: 0.0,
            },
        };
        region.interior = region.find_interior()?;
        Ok(region)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub(crate) fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    /// A feasible point, strictly interior when the region has one.
    pub fn interior_point(&self) -> &InteriorPoint {
        &self.interior
    }

    /// The region has no relative interior within the sum-to-one hyperplane
    /// (zero volume). Samplers then work on the lower-dimensional face.
    pub fn is_degenerate(&self) -> bool {
        !self.interior.strict
    }

    /// Whether every inequality holds within `tol` and every equality holds
    /// within `tol` in absolute value.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_point(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        let c = &self.constraints;
        Ok(c.ineq.iter().all(|row| row.residual(x) <= tol)
            && c.eq.iter().all(|row| row.residual(x).abs() <= tol))
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            })
        } else {
            Ok(())
        }
    }

    fn find_interior(&self) -> Result<InteriorPoint> {
        let p = self.dim;
        let c = &self.constraints;
        let grade = |point: Vec<f64>| {
            let min_slack = c.min_slack(&point);
            InteriorPoint {
                strict: min_slack >= STRICT_SLACK,
                point,
                min_slack,
            }
        };
        let centroid = vec![1.0 / p as f64; p];
        match &self.kind {
            RegionKind::StandardSimplex => return Ok(grade(centroid)),
            RegionKind::BoundedSimplex { lower, upper } => {
                let mid: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
                let candidate = grade(projection::onto_capped_simplex(&mid, lower, upper));
                if candidate.strict {
                    return Ok(candidate);
                }
            }
            RegionKind::LinearPolytope { .. } => {}
        }

        // Average of the projections of the simplex vertices and centroid.
        let mut avg = vec![0.0; p];
        let mut starts = vec![centroid];
        for i in 0..p {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            starts.push(e);
        }
        for s in &starts {
            let x = self.project(s).map_err(|e| match e {
                Error::ProjectionDidNotConverge { .. } => Error::InfeasibleRegion,
                other => other,
            })?;
            if !self.contains(&x, MEMBERSHIP_TOL)? {
                return Err(Error::InfeasibleRegion);
            }
            for (a, v) in avg.iter_mut().zip(&x) {
                *a += v / starts.len() as f64;
            }
        }
        c.project_affine(&mut avg);
        let candidate = grade(avg);
        if candidate.strict {
            return Ok(candidate);
        }

        // Push into the interior by projecting onto shrunken copies of the
        // region, largest margin first.
        for margin in [1e-2, 1e-3, 1e-4, 1e-5, 2e-6] {
            let shrunk: Vec<LinearRow> = c
                .halfspaces
                .iter()
                .map(|h| LinearRow {
                    coef: h.coef.clone(),
                    rhs: h.rhs - margin,
                })
                .collect();
            if let Ok(x) =
                projection::dykstra(&candidate.point, &shrunk, &c.eq_basis, PROJECTION_TOL, 2_000)
            {
                let graded = grade(x);
                if graded.strict && self.contains(&graded.point, MEMBERSHIP_TOL)? {
                    return Ok(graded);
                }
            }
        }
        Ok(candidate)
    }
}

fn check_matrix(name: &str, p: usize, m: &[f64], rhs: &[f64]) -> Result<()> {
    if m.len() != p * rhs.len() {
        return Err(Error::InvalidRegion(alloc::format!(
            "{name} must have {} entries ({} rows of {p}), found {}",
            p * rhs.len(),
            rhs.len(),
            m.len()
        )));
    }
    if m.iter().chain(rhs).any(|v| !v.is_finite()) {
        return Err(Error::InvalidRegion(String::from("constraint entries must be finite")));
    }
    Ok(())
}
