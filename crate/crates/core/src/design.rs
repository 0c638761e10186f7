//! Sliced designs: a point matrix with one slice label per point.

use alloc::vec;
use alloc::vec::Vec;

use crate::region::Region;
use crate::{Error, PointSet, Result};

/// `n` points split into `k` slices. Labels are 0-based internally; file
/// formats use 1-based slice numbers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlicedDesign {
    points: PointSet,
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl SlicedDesign {
    pub fn new(points: PointSet, labels: Vec<usize>, slices: usize) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::SizeMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        let mut sizes = vec![0; slices];
        for (index, &label) in labels.iter().enumerate() {
            if label >= slices {
                return Err(Error::InvalidLabel {
                    index,
                    label,
                    slices,
                });
            }
            sizes[label] += 1;
        }
        Ok(Self {
            points,
            labels,
            sizes,
        })
    }

    /// Single-slice design.
    pub fn unsliced(points: PointSet) -> Self {
        let n = points.len();
        Self {
            points,
            labels: vec![0; n],
            sizes: vec![n],
        }
    }

    /// Concatenates slices in order; slice `k` of the result is `slices[k]`.
    pub fn from_slices(slices: &[PointSet]) -> Result<Self> {
        let first = slices.first().ok_or(Error::EmptyPointSet)?;
        let mut points = PointSet::new(first.dim());
        let mut labels = Vec::new();
        for (k, s) in slices.iter().enumerate() {
            points.extend_from(s)?;
            labels.extend(core::iter::repeat(k).take(s.len()));
        }
        Self::new(points, labels, slices.len())
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn num_slices(&self) -> usize {
        self.sizes.len()
    }

    /// Indices of slice `k`, ascending.
    pub fn slice_indices(&self, k: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == k)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn slice(&self, k: usize) -> PointSet {
        self.points.select(&self.slice_indices(k))
    }

    pub fn slices(&self) -> Vec<PointSet> {
        (0..self.num_slices()).map(|k| self.slice(k)).collect()
    }

    /// Replaces the coordinates, keeping the slice structure.
    pub fn with_points(&self, points: PointSet) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::SizeMismatch {
                expected: self.points.len(),
                found: points.len(),
            });
        }
        Ok(Self {
            points,
            labels: self.labels.clone(),
            sizes: self.sizes.clone(),
        })
    }

    pub(crate) fn set_points(&mut self, points: PointSet) {
        debug_assert_eq!(points.len(), self.points.len());
        self.points = points;
    }

    /// Errors with [`Error::EmptySlice`] for the first empty slice.
    pub fn require_nonempty_slices(&self) -> Result<()> {
        match self.sizes.iter().position(|&s| s == 0) {
            Some(slice) => Err(Error::EmptySlice { slice }),
            None if self.is_empty() => Err(Error::EmptyPointSet),
            None => Ok(()),
        }
    }

    /// Indices of points that fail region membership at `tol`.
    pub fn infeasible_points(&self, region: &Region, tol: f64) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, x) in self.points.iter().enumerate() {
            if !region.contains(x, tol)? {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_slices() {
        let pts = PointSet::from_rows(1, &[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let d = SlicedDesign::new(pts, vec![1, 0, 1, 1], 2).unwrap();
        assert_eq!(d.sizes(), &[1, 3]);
        assert_eq!(d.slice_indices(1), vec![0, 2, 3]);
        assert_eq!(d.slice(0).row(0), &[1.0]);
    }

    #[test]
    fn rejects_out_of_range_label() {
        let pts = PointSet::from_rows(1, &[[0.0]]).unwrap();
        assert!(matches!(
            SlicedDesign::new(pts, vec![2], 2),
            Err(Error::InvalidLabel { .. })
        ));
    }

    #[test]
    fn empty_slice_detected() {
        let pts = PointSet::from_rows(1, &[[0.0]]).unwrap();
        let d = SlicedDesign::new(pts, vec![0], 2).unwrap();
        assert_eq!(d.require_nonempty_slices(), Err(Error::EmptySlice { slice: 1 }));
    }
}
