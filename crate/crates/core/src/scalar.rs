//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real floating point type usable by the dense kernels, the sketches and
/// the regression engine.
///
/// Tolerances that the algorithms depend on are attached to the type so that
/// single precision gets thresholds it can actually resolve.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Singular values at or below `pinv_rtol() * sigma_max` are treated as zero.
    fn pinv_rtol() -> Self;

    /// Relative tolerance for range-membership tests in the rank-one
    /// pseudoinverse update.
    fn range_rtol() -> Self;

    /// Lossy conversion from `f64`, used for literal constants.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count or index.
    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn pinv_rtol() -> Self {
        1e-12
    }

    #[inline]
    fn range_rtol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    #[inline]
    fn pinv_rtol() -> Self {
        1e-6
    }

    #[inline]
    fn range_rtol() -> Self {
        1e-5
    }
}
