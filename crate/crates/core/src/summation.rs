//! Compensated summation.
//!
//! Uses the Neumaier variant of Kahan summation, which also recovers the
//! low-order bits when an addend is larger in magnitude than the running sum.

use std::iter::Sum;
use std::ops::AddAssign;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }

    /// Whether the represented total is at least `threshold`, decided on the
    /// unrounded pair so that totals just below it are not rounded up.
    pub fn at_least(&self, threshold: T) -> bool {
        (self.sum - threshold) + self.compensation >= T::zero()
    }

    /// Multiplies the represented total by `factor` (used when an
    /// accumulator changes its reference scale).
    pub fn scale(&mut self, factor: T) {
        self.sum *= factor;
        self.compensation *= factor;
    }
}

impl<T: Scalar> AddAssign<T> for KahanSum<T> {
    fn add_assign(&mut self, rhs: T) {
        self.add(rhs);
    }
}

impl<T: Scalar> Sum<T> for KahanSum<T> {
    fn sum<I: Iterator<Item = T>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated total of an iterator.
pub fn kahan_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().sum::<KahanSum<T>>().value()
}

/// Running compensated partial sums: entry `i` is the sum of `values[..=i]`.
pub fn partial_sums<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut acc = KahanSum::new();
    values
        .iter()
        .map(|&x| {
            acc.add(x);
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_addends() {
        let mut acc = KahanSum::new();
        acc.add(1.0f64);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-24);
    }

    #[test]
    fn neumaier_case_large_addend() {
        // naive Kahan loses the leading 1.0 here
        assert_eq!(kahan_sum([1.0f64, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn partial_sums_are_running_totals() {
        let ps = partial_sums(&[1.0f64, 2.0, 3.0]);
        assert_eq!(ps, vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn harmonic_million_matches_asymptotic() {
        let h = kahan_sum((1..=1_000_000u32).map(|k| 1.0f64 / k as f64));
        // H_n = ln n + gamma + 1/(2n) - 1/(12 n^2)
        let n = 1e6f64;
        let asym = n.ln() + 0.577_215_664_901_532_9 + 0.5 / n - 1.0 / (12.0 * n * n);
        assert!((h - asym).abs() < 1e-13);
    }
}
