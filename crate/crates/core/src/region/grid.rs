use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Full factorial grid of process-variable levels. Slice `k` corresponds to
/// `labels()[k]`; the last variable varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProcessGrid {
    levels: Vec<usize>,
    labels: Vec<Vec<usize>>,
}

impl ProcessGrid {
    pub fn new(levels: Vec<usize>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("at least one process variable is required".into()));
        }
        if levels.iter().any(|&s| s == 0) {
            return Err(Error::InvalidArgument("level counts must be positive".into()));
        }
        let k = levels
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::InvalidArgument("too many level combinations".into()))?;
        let mut labels = Vec::with_capacity(k);
        let mut combo = vec![1; levels.len()];
        for _ in 0..k {
            labels.push(combo.clone());
            for j in (0..levels.len()).rev() {
                if combo[j] < levels[j] {
                    combo[j] += 1;
                    break;
                }
                combo[j] = 1;
            }
        }
        Ok(Self { levels, labels })
    }

    /// Number of process variables.
    pub fn q(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Number of level combinations (slices).
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Level combinations, 1-based levels.
    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn slice_of(&self, combo: &[usize]) -> Option<usize> {
        self.labels.iter().position(|l| l == combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_full_factorial() {
        let g = ProcessGrid::new(vec![2, 3]).unwrap();
        assert_eq!(g.k(), 6);
        assert_eq!(g.labels()[0], vec![1, 1]);
        assert_eq!(g.labels()[1], vec![1, 2]);
        assert_eq!(g.labels()[5], vec![2, 3]);
        let mut sorted = g.labels().to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
        assert_eq!(g.slice_of(&[2, 1]), Some(3));
    }

    #[test]
    fn two_binary_factors_give_four_slices() {
        assert_eq!(ProcessGrid::new(vec![2, 2]).unwrap().k(), 4);
    }

    #[test]
    fn zero_levels_rejected() {
        assert!(ProcessGrid::new(vec![3, 0]).is_err());
        assert!(ProcessGrid::new(vec![]).is_err());
    }
}
