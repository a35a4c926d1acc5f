//! Special functions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `erf(x)`.
pub fn erf<T: Scalar>(x: T) -> T {
    T::lit(libm::erf(x.as_f64()))
}

/// `(2 / pi) int_0^t exp(-x^2 / pi) dx = erf(t / sqrt(pi))`, the CDF of
/// `|N(0, pi / 2)|`.
pub fn half_gaussian_cdf<T: Scalar>(t: T) -> Result<T> {
    if t.is_nan() || t < T::zero() {
        return Err(Error::NegativeT(t.as_f64()));
    }
    Ok(erf(t / T::PI().sqrt()))
}
