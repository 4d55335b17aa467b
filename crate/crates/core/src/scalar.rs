//! Scalar abstraction for the algebraic layers.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{NumAssign, ToPrimitive};

/// Coefficient field used by tensors, Lie elements and polynomials.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Only field operations
/// are required; nothing here assumes floating point.
pub trait Scalar:
    NumAssign + Neg<Output = Self> + Clone + Debug + PartialOrd + Send + Sync + 'static
{
    /// The rational number `num / den`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Nearest `f64`; used for tolerance checks and reporting.
    fn to_f64(&self) -> f64;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// `self^k` by repeated multiplication.
    fn powu(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc *= self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powu(&self, k: usize) -> Self {
        self.powi(k as i32)
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Reciprocal factorials `1/0!, 1/1!, ..., 1/k!`.
pub(crate) fn inverse_factorials<T: Scalar>(k: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(k + 1);
    let mut acc = T::one();
    out.push(acc.clone());
    for j in 1..=k {
        acc /= T::from_int(j as i64);
        out.push(acc.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ratios() {
        let third = BigRational::from_ratio(1, 3);
        assert_eq!(third.clone() * BigRational::from_int(3), BigRational::from_int(1));
        assert_eq!(Scalar::to_f64(&third), 1.0 / 3.0);
    }

    #[test]
    fn factorials() {
        let f: Vec<BigRational> = inverse_factorials(4);
        assert_eq!(f[4], BigRational::from_ratio(1, 24));
        let g: Vec<f64> = inverse_factorials(3);
        assert!((g[3] - 1.0 / 6.0).abs() < 1e-16);
    }
}
