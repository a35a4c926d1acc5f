//! Cauchy and F-transforms, their iterates, and exact monotone powers.

mod branch;
mod nevanlinna;
mod power;
mod rational;

pub use branch::{branch_preimage, branch_preimages};
pub use nevanlinna::{constants_c_d, nevanlinna_extract, BoundConstants, NevanlinnaData};
pub use power::{
    monotone_power_exact, monotone_power_tails, power_atom_count, pull_back, PowerTails,
    DEFAULT_ATOM_BUDGET,
};
pub use rational::{measure_to_rational_f, RationalFn};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::measures::MeasureSpec;
use crate::scalar::{sqrt_cut, Scalar};

/// Self-map of the upper half-plane given by the F-transform of a measure.
#[derive(Debug, Clone, PartialEq)]
pub enum FTransform<T> {
    Nevanlinna(NevanlinnaData<T>),
    /// `sqrt(z^2 - 2)`.
    Arcsine,
    /// `r + sqrt((z - r)^2 - 2)`.
    NuR(T),
}

impl<T: Scalar> FTransform<T> {
    pub fn new(spec: &MeasureSpec<T>) -> Self {
        match spec {
            MeasureSpec::Atomic(m) => FTransform::Nevanlinna(nevanlinna_extract(m)),
            MeasureSpec::Arcsine => FTransform::Arcsine,
            MeasureSpec::NuR(r) => FTransform::NuR(*r),
        }
    }

    /// `F(z)` for `Im z > 0`. No domain check.
    #[inline]
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        match self {
            FTransform::Nevanlinna(nd) => nd.eval(z),
            FTransform::Arcsine => arcsine_f(z),
            FTransform::NuR(r) => nu_r_f(*r, z),
        }
    }

    /// `F^n(z)`.
    #[inline]
    pub fn iterate(&self, n: u64, z: Complex<T>) -> Complex<T> {
        let mut w = z;
        for _ in 0..n {
            w = self.eval(w);
        }
        w
    }

    /// `F^n` applied to every entry of `zs` in place. The independent orbits
    /// advance in lockstep, which hides the latency of each step.
    pub fn iterate_many(&self, n: u64, zs: &mut [Complex<T>]) {
        match self {
            FTransform::Nevanlinna(nd) if nd.poles().len() == 1 => {
                let (p, m, c) = (nd.poles()[0], nd.masses()[0], nd.shift());
                for _ in 0..n {
                    for w in zs.iter_mut() {
                        let dx = p - w.re;
                        let r = m / (dx * dx + w.im * w.im);
                        *w = Complex::new(w.re - c + dx * r, w.im + w.im * r);
                    }
                }
            }
            _ => {
                for _ in 0..n {
                    for w in zs.iter_mut() {
                        *w = self.eval(*w);
                    }
                }
            }
        }
    }

    /// [`normalized_power`](Self::normalized_power) for every entry of `zs`, in place.
    pub fn normalized_power_many(&self, n: u64, zs: &mut [Complex<T>]) {
        let s = T::from_u64(n).expect("n representable").sqrt();
        for w in zs.iter_mut() {
            *w *= s;
        }
        self.iterate_many(n, zs);
        for w in zs.iter_mut() {
            *w /= s;
        }
    }

    /// F-transform of `D_{1/sqrt n}(mu^n)` at `z`: `F^n(sqrt(n) z) / sqrt(n)`.
    #[inline]
    pub fn normalized_power(&self, n: u64, z: Complex<T>) -> Complex<T> {
        let s = T::from_u64(n).expect("n representable").sqrt();
        self.iterate(n, z * s) / s
    }
}

/// `sqrt(z^2 - 2)` on the branch mapping the upper half-plane into itself.
#[inline]
pub fn arcsine_f<T: Scalar>(z: Complex<T>) -> Complex<T> {
    sqrt_cut(z * z - T::lit(2.0))
}

#[inline]
pub fn nu_r_f<T: Scalar>(r: T, z: Complex<T>) -> Complex<T> {
    let w = z - r;
    sqrt_cut(w * w - T::lit(2.0)) + r
}

fn upper<T: Scalar>(z: Complex<T>) -> Result<()> {
    if z.im > T::zero() && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::RealAxisInput {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        })
    }
}

/// Cauchy transform `int dmu(t) / (z - t)` for `z` off the real axis.
pub fn eval_g<T: Scalar>(spec: &MeasureSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::RealAxisInput {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    if let MeasureSpec::Atomic(m) = spec {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (t, w) in m.atoms() {
            acc += Complex::new(w, T::zero()) / (z - t);
        }
        return Ok(acc);
    }
    let f = FTransform::new(spec);
    if z.im > T::zero() {
        Ok(f.eval(z).inv())
    } else {
        Ok(f.eval(z.conj()).inv().conj())
    }
}

/// `F = 1/G` on the upper half-plane.
pub fn eval_f<T: Scalar>(spec: &MeasureSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    upper(z)?;
    match spec {
        MeasureSpec::Atomic(_) => Ok(eval_g(spec, z)?.inv()),
        _ => Ok(FTransform::new(spec).eval(z)),
    }
}

/// `F^n(z)`, with `F^0` the identity.
pub fn iterate_f<T: Scalar>(spec: &MeasureSpec<T>, n: u64, z: Complex<T>) -> Result<Complex<T>> {
    upper(z)?;
    Ok(FTransform::new(spec).iterate(n, z))
}

/// F-transform of the normalised power `mu_n` at `z`.
pub fn normalized_power_f<T: Scalar>(
    spec: &MeasureSpec<T>,
    n: u64,
    z: Complex<T>,
) -> Result<Complex<T>> {
    upper(z)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "normalised power needs n >= 1".into(),
        ));
    }
    Ok(FTransform::new(spec).normalized_power(n, z))
}

/// A point `F^index(z)` of a forward orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint<T> {
    pub index: u64,
    pub z: Complex<T>,
}

/// `z, F(z), ..., F^n(z)`.
pub fn orbit<T: Scalar>(
    spec: &MeasureSpec<T>,
    n: u64,
    z: Complex<T>,
) -> Result<Vec<OrbitPoint<T>>> {
    upper(z)?;
    let f = FTransform::new(spec);
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut w = z;
    out.push(OrbitPoint { index: 0, z: w });
    for index in 1..=n {
        w = f.eval(w);
        out.push(OrbitPoint { index, z: w });
    }
    Ok(out)
}
