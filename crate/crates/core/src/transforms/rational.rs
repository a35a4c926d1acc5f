use num_complex::Complex;

use crate::measures::AtomicMeasure;
use crate::scalar::Scalar;

/// Ratio of two real polynomials, coefficients stored lowest degree first.
/// The denominator is monic.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn<T> {
    num: Vec<T>,
    den: Vec<T>,
}

impl<T: Scalar> RationalFn<T> {
    /// Builds `num / den`, dividing both by the leading denominator coefficient.
    /// Returns `None` if the denominator is identically zero.
    pub fn new(num: Vec<T>, den: Vec<T>) -> Option<Self> {
        let den = trim(den);
        let lead = *den.last()?;
        if lead == T::zero() {
            return None;
        }
        let num = trim(num).into_iter().map(|c| c / lead).collect();
        let den = den.into_iter().map(|c| c / lead).collect();
        Some(RationalFn { num, den })
    }

    pub fn numerator(&self) -> &[T] {
        &self.num
    }

    pub fn denominator(&self) -> &[T] {
        &self.den
    }

    pub fn num_degree(&self) -> usize {
        self.num.len().saturating_sub(1)
    }

    pub fn den_degree(&self) -> usize {
        self.den.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        horner(&self.num, z) / horner(&self.den, z)
    }

    pub fn eval_real(&self, x: T) -> T {
        let p = self.num.iter().rev().fold(T::zero(), |acc, &c| acc * x + c);
        let q = self.den.iter().rev().fold(T::zero(), |acc, &c| acc * x + c);
        p / q
    }
}

fn trim<T: Scalar>(mut p: Vec<T>) -> Vec<T> {
    while p.len() > 1 && *p.last().unwrap() == T::zero() {
        p.pop();
    }
    p
}

fn horner<T: Scalar>(p: &[T], z: Complex<T>) -> Complex<T> {
    p.iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

// p(z) * (z - a)
fn times_linear<T: Scalar>(p: &[T], a: T) -> Vec<T> {
    let mut out = vec![T::zero(); p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= a * c;
    }
    out
}

/// `F = 1/G` as a rational function: with `G = P/Q`, `Q = prod (z - t_i)` and
/// `P = sum_i w_i prod_{j != i} (z - t_j)`, this returns `Q/P` with `P` made
/// monic. Numerator degree `N`, denominator degree `N - 1`.
pub fn measure_to_rational_f<T: Scalar>(m: &AtomicMeasure<T>) -> RationalFn<T> {
    let t = m.positions();
    let mut q = vec![T::one()];
    for &ti in t {
        q = times_linear(&q, ti);
    }
    let mut p = vec![T::zero(); t.len().max(1)];
    for (i, &wi) in m.weights().iter().enumerate() {
        let mut term = vec![wi];
        for (j, &tj) in t.iter().enumerate() {
            if j != i {
                term = times_linear(&term, tj);
            }
        }
        for (k, c) in term.into_iter().enumerate() {
            p[k] += c;
        }
    }
    RationalFn::new(q, p).expect("total mass is positive")
}
