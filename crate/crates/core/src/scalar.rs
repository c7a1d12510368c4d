use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use smallvec::SmallVec;

/// Floating-point scalar the ART dynamics are written against (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + LowerExp + FromStr + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for types that cannot hold it, which no
    /// implementor of `Float` does for finite values.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + Debug
        + Display
        + LowerExp
        + FromStr
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Exact floating-point summation (Shewchuk's non-overlapping partials).
///
/// [`ExactSum::total`] is the correctly rounded value of the exact sum, so the
/// result does not depend on the order terms are added in. Complement-coded
/// inputs therefore have norm exactly `M`, and sparse and dense evaluations of
/// `|I ∧ w|` agree bit for bit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum<T> {
    partials: SmallVec<[T; 8]>,
}

impl<T: Scalar> ExactSum<T> {
    pub fn new() -> Self {
        Self {
            partials: SmallVec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != T::zero() {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Correctly rounded total (round half to even).
    pub fn total(&self) -> T {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return T::zero();
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = T::zero();
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != T::zero() {
                break;
            }
        }
        // Half-way case: the partials below decide the rounding direction.
        if n > 0
            && ((lo < T::zero() && p[n - 1] < T::zero())
                || (lo > T::zero() && p[n - 1] > T::zero()))
        {
            let y = lo + lo;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl<T: Scalar> FromIterator<T> for ExactSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_is_order_independent() {
        let xs = [1e16, 1.0, -1e16, 0.1, 0.2, 0.3, 1e-20];
        let fwd: ExactSum<f64> = xs.iter().copied().collect();
        let rev: ExactSum<f64> = xs.iter().rev().copied().collect();
        assert_eq!(fwd.total(), rev.total());
        assert_eq!(fwd.total(), 1.6);
    }

    #[test]
    fn exact_sum_rounds_half_to_even() {
        // 1 + 2^-53 is exactly half-way between 1 and its successor; the extra
        // tiny term pushes it up.
        let up: ExactSum<f64> = [1.0, 2f64.powi(-53), 2f64.powi(-80)].into_iter().collect();
        assert_eq!(up.total(), 1.0 + f64::EPSILON);
        let even: ExactSum<f64> = [1.0, 2f64.powi(-53)].into_iter().collect();
        assert_eq!(even.total(), 1.0);
    }

    #[test]
    fn complement_pairs_sum_to_dimension() {
        let xs = [0.1, 0.7, 0.3333333333333333, 1e-300, 0.999999];
        let acc: ExactSum<f64> = xs.iter().flat_map(|&x| [x, 1.0 - x]).collect();
        assert_eq!(acc.total(), 5.0);
    }
}
