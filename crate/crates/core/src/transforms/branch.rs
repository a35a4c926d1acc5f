use crate::error::{Error, Result};
use crate::roots::increasing_root;
use crate::scalar::Scalar;

use super::nevanlinna::NevanlinnaData;

const MAX_BRACKET_WIDTH: f64 = 1e6;

/// Solves `F(x) = target` on one branch, i.e. on the `branch`-th interval
/// between consecutive poles (the first and last intervals are unbounded).
pub fn branch_preimage<T: Scalar>(nd: &NevanlinnaData<T>, branch: usize, target: T) -> Result<T> {
    let poles = nd.poles();
    let shift = nd.shift();
    if poles.is_empty() {
        return Ok(target + shift);
    }
    if branch > poles.len() {
        return Err(Error::InvalidArgument(format!(
            "branch {branch} out of range for {} poles",
            poles.len()
        )));
    }
    let f = |x: T| nd.eval_real(x);
    let fail = |lo: T, hi: T| Error::BracketFailure {
        branch,
        target: target.as_f64(),
        lo: lo.as_f64(),
        hi: hi.as_f64(),
    };
    let cap = T::lit(MAX_BRACKET_WIDTH);
    let two = T::lit(2.0);

    let lo = if branch == 0 {
        let base = poles[0].min(target + shift);
        let mut w = T::one();
        loop {
            let x = base - w;
            if matches!(f(x), Some(v) if v < target) {
                break x;
            }
            if w >= cap {
                return Err(fail(x, poles[0]));
            }
            w *= two;
        }
    } else {
        poles[branch - 1]
    };
    let hi = if branch == poles.len() {
        let base = poles[poles.len() - 1].max(target + shift);
        let mut w = T::one();
        loop {
            let x = base + w;
            if matches!(f(x), Some(v) if v > target) {
                break x;
            }
            if w >= cap {
                return Err(fail(poles[poles.len() - 1], x));
            }
            w *= two;
        }
    } else {
        poles[branch]
    };

    let x = increasing_root(
        |x| match nd.eval_real(x) {
            Some(v) => (v - target, nd.derivative_real(x)),
            // exactly on a pole: F jumps from +inf to -inf, treat by side
            None => (T::zero(), T::one()),
        },
        lo,
        hi,
        T::zero(),
    );
    if !(x > lo && x < hi) {
        return Err(fail(lo, hi));
    }
    Ok(x)
}

/// All solutions of `F(x) = target`, one per branch, in increasing order.
pub fn branch_preimages<T: Scalar>(nd: &NevanlinnaData<T>, target: T) -> Result<Vec<T>> {
    (0..=nd.poles().len())
        .map(|b| branch_preimage(nd, b, target))
        .collect()
}
