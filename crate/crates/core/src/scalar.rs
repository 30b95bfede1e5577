//! Scalar abstraction shared by every module.
//!
//! All of the physics is written once against [`Real`]; `f64` is the working
//! precision for the analytic pipelines and the CLI, `f32` is supported with
//! tolerances that scale with machine epsilon.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Tolerance for unit-norm invariants: `1e-12` in `f64`, scaled up to the
    /// precision floor for narrower types.
    #[inline]
    fn norm_tol() -> Self {
        Self::lit(1e-12).max(Self::lit(64.0) * Self::epsilon())
    }

    /// Tolerance for "exactly at this angle" decisions (equatorial `theta`,
    /// odd multiples of pi).
    #[inline]
    fn angle_tol() -> Self {
        Self::lit(1e-12).max(Self::lit(8.0) * Self::epsilon())
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle into the principal interval `(-pi, pi]`.
pub fn wrap_to_pi<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let mut r = x - tau * ((x + T::PI()) / tau).floor();
    // r is in [-pi, pi); move the lower endpoint up.
    if r <= -T::PI() {
        r = r + tau;
    }
    if r > T::PI() {
        r = r - tau;
    }
    r
}

/// Sign of `x` as `-1`, `0` or `+1`.
pub fn signum0<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

pub fn deg_to_rad<T: Real>(deg: T) -> T {
    deg * T::PI() / T::lit(180.0)
}

pub fn rad_to_deg<T: Real>(rad: T) -> T {
    rad * T::lit(180.0) / T::PI()
}
