//! Numeric abstraction shared by every metric.
//!
//! Metrics that only need field arithmetic are generic over [`Scalar`], which
//! covers `f32`, `f64` and exact rationals such as [`crate::Exact`]. The
//! entropy-based disorder measure needs logarithms and is bounded by
//! [`num_traits::Float`] instead.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element usable by the metric formulas.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug
{
    /// Exact conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Milliseconds to seconds, exact for rational scalars.
    fn from_millis(ms: u64) -> Self {
        Self::from_u64(ms).expect("millisecond count representable in scalar type")
            / Self::from_u64(1000).expect("1000 representable")
    }

    /// Decimal value read from a file (seconds, thresholds).
    fn from_decimal(x: f64) -> Self {
        Self::from_f64(x).expect("decimal representable in scalar type")
    }

    fn to_decimal(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn ten() -> Self {
        Self::from_count(10)
    }

    fn four() -> Self {
        Self::from_count(4)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug
{
}
