//! The floating-point scalar abstraction the whole crate is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for sample values, frequencies and distances.
///
/// Implemented for `f32` and `f64`. Integer-valued quantities (window
/// counts, cell coordinates) never go through this trait.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossless widening used for hashing cell coordinates.
    fn to_f64_lossless(self) -> f64;

    /// Converts a count or small integer. Never fails for the magnitudes used here.
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every Float")
    }

    /// Converts a literal constant.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("constant is representable")
    }

    /// `2^-j`, the weight of the j-th dimension or scale level.
    fn weight(j: usize) -> Self {
        Self::lit(0.5).powi(j as i32)
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        f64::from(self)
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
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
    fn weights_halve() {
        assert_eq!(f64::weight(1), 0.5);
        assert_eq!(f64::weight(3), 0.125);
        assert_eq!(f32::weight(2), 0.25);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-15).abs() < 1e-30);
    }
}
