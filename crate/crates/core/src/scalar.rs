//! Scalar abstraction for the numeric core.
//!
//! All field, orbit, and estimator math is written against [`Scalar`] so the
//! same code runs in `f32` or `f64`. The crate root exports `f64` aliases for
//! the common types; `f64` is what the shipped pipeline uses.

use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` reference constant.
    fn from_f64c(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
