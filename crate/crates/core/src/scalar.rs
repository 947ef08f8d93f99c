use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar the numerical core is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant. Every `f64` is representable (possibly
    /// rounded) in the implementing types, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used for "sums to one" style invariants: 1e-10 in `f64`,
    /// loosened to a few hundred ulps for narrower types.
    #[inline]
    fn unit_sum_tolerance() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(256.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
