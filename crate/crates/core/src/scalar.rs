use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the numerical core is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Ring + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only for non-representable values,
    /// which never happens for the constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Value as `f64`, used at serialization boundaries.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Commutative ring with real literals. Implemented for plain scalars and for
/// truncated Taylor series, so polynomial coefficient builders can be
/// evaluated both on values and on their arc-length derivatives.
pub trait Ring:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_lit(x: f64) -> Self;

    fn ring_zero() -> Self {
        Self::from_lit(0.0)
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Ring for f32 {
    fn from_lit(x: f64) -> Self {
        x as f32
    }
}

impl Ring for f64 {
    fn from_lit(x: f64) -> Self {
        x
    }
}
