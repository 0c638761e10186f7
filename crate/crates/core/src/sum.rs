//! Compensated summation.
//!
//! Pairwise-distance sums over reference samples of size 10^4 add up 10^8
//! terms; a plain left fold loses several digits there. Energy and objective
//! sums go through [`Accumulator`] (Neumaier's variant of Kahan summation).

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merge another partial sum into this one.
    pub fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for Accumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Accumulator>().value()
}

/// Compensated vector accumulator of fixed dimension.
#[derive(Debug, Clone)]
pub struct VecAccumulator {
    parts: alloc::vec::Vec<Accumulator>,
}

impl VecAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            parts: alloc::vec![Accumulator::new(); dim],
        }
    }

    /// Adds `scale * v`.
    #[inline]
    pub fn add_scaled(&mut self, v: &[f64], scale: f64) {
        for (acc, x) in self.parts.iter_mut().zip(v) {
            acc.add(scale * x);
        }
    }

    pub fn values(&self) -> alloc::vec::Vec<f64> {
        self.parts.iter().map(Accumulator::value).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let mut acc = Accumulator::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn many_tenths() {
        let s = sum(core::iter::repeat(0.1).take(1_000_000));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: alloc::vec::Vec<f64> = (1..1000).map(|i| 1.0 / i as f64).collect();
        let whole = sum(xs.iter().copied());
        let mut a: Accumulator = xs[..400].iter().copied().collect();
        let b: Accumulator = xs[400..].iter().copied().collect();
        a.merge(&b);
        assert!((a.value() - whole).abs() < 1e-15);
    }
}
