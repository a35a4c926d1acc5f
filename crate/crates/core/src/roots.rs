use crate::scalar::Scalar;

const MAX_ITER: usize = 400;

/// Root of a strictly increasing function on the open interval `(lo, hi)`.
///
/// `f` returns `(value, derivative)`. The function must be negative near `lo`
/// and positive near `hi`; the endpoints themselves are never evaluated, so
/// they may be poles. Newton steps are taken when they stay inside the
/// current bracket, bisection otherwise. Iteration stops once
/// `|value| <= ftol` or the bracket can no longer shrink.
pub(crate) fn increasing_root<T, F>(mut f: F, mut lo: T, mut hi: T, ftol: T) -> T
where
    T: Scalar,
    F: FnMut(T) -> (T, T),
{
    let two = T::lit(2.0);
    let mut x = lo + (hi - lo) / two;
    let mut best = x;
    let mut best_abs = T::infinity();
    for _ in 0..MAX_ITER {
        let (v, d) = f(x);
        if v.abs() < best_abs {
            best = x;
            best_abs = v.abs();
        }
        if v.abs() <= ftol {
            return x;
        }
        if v < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        let next = if d > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            lo + (hi - lo) / two
        };
        if next == x || next <= lo || next >= hi {
            break;
        }
        x = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = increasing_root(|x: f64| (x * x - 2.0, 2.0 * x), 0.0, 5.0, 0.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pole_endpoints_are_not_evaluated() {
        // tan on (-pi/2, pi/2): poles at both ends
        let h = std::f64::consts::FRAC_PI_2;
        let r = increasing_root(
            |x: f64| (x.tan() - 3.0, 1.0 / x.cos().powi(2)),
            -h,
            h,
            1e-14,
        );
        assert!((r - 3f64.atan()).abs() < 1e-14);
    }
}
