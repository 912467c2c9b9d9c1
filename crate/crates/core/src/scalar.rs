//! Floating-point scalar abstraction for the numeric core.
//!
//! The hydraulics, kernel-regression, hybrid and metrics math is written
//! once, generic over [`Scalar`], and instantiated for `f32`/`f64`. The
//! crate root exports `f64` aliases, which is the working precision of the
//! toolkit (model persistence and telemetry are `f64` only).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal (model constant, unit factor, tolerance).
    #[inline]
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    /// Widens to `f64` for diagnostics and error payloads.
    #[inline]
    fn widen(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
