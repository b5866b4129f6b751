//! Numeric scalar abstraction.
//!
//! Every quantity in this crate (values, probabilities, prices, gaps) is a
//! scalar from an ordered field with exact arithmetic. The [`Scalar`] trait
//! captures what the algorithms need: field operations, a total order, signs,
//! and conversion from machine integers. `Ratio<BigInt>` and `Ratio<i64>`
//! both qualify; floating-point types do not (no total order, no exactness),
//! which is intentional: all comparisons in this crate are exact.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// An exactly-representable ordered field element.
pub trait Scalar: Clone + Num + Signed + Ord + FromPrimitive + Debug + Display {
    /// Lifts a machine integer into the scalar type.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    /// `self^exp` by repeated multiplication (exponent is small here).
    fn int_pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T> Scalar for T where T: Clone + Num + Signed + Ord + FromPrimitive + Debug + Display {}

/// Sum of a scalar iterator (the trait does not require `iter::Sum`).
pub fn sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().fold(T::zero(), |acc, x| acc + x)
}
