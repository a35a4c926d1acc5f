//! The real scalar the numerics are generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Every tolerance quoted in the documentation is an `f64` tolerance; with
/// `f32` the routines run but only reach single precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `max(tol, k * epsilon)`: a tolerance that stays meaningful in single precision.
    #[inline]
    fn tol(tol: f64, k: f64) -> Self {
        Self::lit(tol).max(Self::epsilon() * Self::lit(k))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Square root with its cut along `[0, +inf)` and `sqrt(-1) = i`.
///
/// This is the branch under which `sqrt(z^2 - 2)` maps the upper half-plane
/// into itself.
#[inline]
pub fn sqrt_cut<T: Scalar>(w: Complex<T>) -> Complex<T> {
    let r = (-w).sqrt();
    Complex::new(-r.im, r.re)
}
