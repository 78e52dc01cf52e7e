//! Scalar abstraction for the geometric core.
//!
//! Every algorithm in this crate is generic over a floating-point scalar so
//! the same code runs on `f32` and `f64`. The CLI and the file formats pin
//! `f64`; see the type aliases at the crate root.

use std::fmt;

/// Floating-point scalar usable as a coordinate or a radius.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion for diagnostics and exports.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Conversion from a point or vertex count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl<T> Scalar for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}
