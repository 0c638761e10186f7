//! Sliced space-filling designs for mixture experiments.
//!
//! The quantitative factors of a mixture experiment are proportions living on
//! a (possibly constrained) simplex; qualitative process variables split the
//! runs into slices. This crate builds designs whose full point set and every
//! slice are close, in energy distance, to the uniform distribution on the
//! experimental region, using Majorization-Minimization updates with closed
//! form steps.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the companion `smd` crate.
//!
//! ## Layout
//!
//! * [`region`] – experimental regions, membership, Euclidean projection and
//!   uniform sampling (flat Dirichlet, rejection, hit-and-run).
//! * [`energy`] – empirical energy distances, the slice decomposition and
//!   the hybrid criterion.
//! * [`solver`] – one-shot and sequential MM solvers.
//! * [`partition`] – splitting an existing point set into representative
//!   slices.
//! * [`metrics`] – uniformity criteria used to compare designs.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod design;
pub mod energy;
mod error;
pub mod metrics;
pub mod partition;
pub mod points;
pub mod region;
pub mod seed;
pub mod solver;
pub mod sum;

pub use design::SlicedDesign;
pub use error::{Error, Result};
pub use points::PointSet;
pub use region::{ProcessGrid, Region, RegionKind};
