//! Scalar abstraction for the closed-form math layers.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar type the analytic layers are generic over.
///
/// `f64` is the type the engine and the CLI use; `f32` is supported for the
/// closed-form layers but is too coarse for the quadrature tolerances.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Copy + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for values a float cannot
    /// represent at all (never the case for the constants used here).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy view of the scalar as `f64`, used for error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Vacuum speed of light in m/s, in the requested scalar type.
pub fn speed_of_light<T: Real>() -> T {
    T::lit(299_792_458.0)
}
