//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Tolerances that depend on the working precision (Perron iteration
/// residuals, Gibbs identity checks) are taken from [`Real::perron_tol`] and
/// [`Real::identity_tol`], so generic code does not hard-code `f64` limits.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into the scalar type.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance used to stop power iteration.
    fn perron_tol() -> Self;

    /// Tolerance for identities that hold exactly in exact arithmetic.
    fn identity_tol() -> Self;
}

impl Real for f32 {
    fn perron_tol() -> Self {
        2e-6
    }
    fn identity_tol() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn perron_tol() -> Self {
        1e-14
    }
    fn identity_tol() -> Self {
        1e-9
    }
}
