//! Scalar abstraction. Everything numeric in this crate is generic over
//! [`Real`], which `f32` and `f64` implement; the crate root exports `f64`
//! aliases for the common case.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the geometry and solver code.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + std::iter::Sum + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the active scalar type.
#[inline]
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite f64 constant must convert")
}

/// Lossy view of a scalar as `f64`, for error payloads and reports.
#[inline]
pub fn as_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance for validating that convex weights sum to one. Exactly 1e-12
/// in double precision; widened in lower precisions so the check stays
/// meaningful there.
#[inline]
pub fn weight_sum_tol<T: Real>() -> T {
    let eps_scaled = T::epsilon() * real(16.0);
    let base: T = real(1e-12);
    if eps_scaled > base {
        eps_scaled
    } else {
        base
    }
}
