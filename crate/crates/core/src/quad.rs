//! Adaptive Gauss-Kronrod quadrature on finite intervals.

#![allow(clippy::excessive_precision)]

use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    /// Absolute error target for the whole integral, shared between panels in
    /// proportion to their width.
    pub abs_tol: T,
    /// Panels narrower than this are accepted regardless of their error estimate.
    pub min_width: T,
    /// Hard cap on the number of panels ever created.
    pub max_panels: usize,
}

impl<T: Scalar> Default for QuadConfig<T> {
    fn default() -> Self {
        QuadConfig {
            abs_tol: T::lit(1e-9),
            min_width: T::lit(1e-6),
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Sum of the per-panel Kronrod/Gauss discrepancies.
    pub error: T,
    pub evaluations: usize,
    pub panels: usize,
}

/// Abscissae of the 15-point Kronrod rule on `[a, b]`, centre first, then
/// symmetric pairs `(mid - dx_j, mid + dx_j)` for `j = 0..7`.
fn kronrod_nodes<T: Scalar>(a: T, b: T, out: &mut [T]) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    out[0] = mid;
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        out[1 + 2 * j] = mid - dx;
        out[2 + 2 * j] = mid + dx;
    }
}

fn kronrod_combine<T: Scalar>(a: T, b: T, v: &[T]) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mut kronrod = v[0] * T::lit(WGK[7]);
    let mut gauss = v[0] * T::lit(WG[3]);
    for j in 0..7 {
        let pair = v[1 + 2 * j] + v[2 + 2 * j];
        kronrod += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

/// One 15-point Kronrod panel; returns `(kronrod, |kronrod - gauss|)`.
pub fn gauss_kronrod_15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let mut x = [T::zero(); 15];
    kronrod_nodes(a, b, &mut x);
    let v = x.map(f);
    kronrod_combine(a, b, &v)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by `breaks` and bisecting any panel whose error estimate exceeds
/// its share of `cfg.abs_tol`.
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    breaks: &[T],
    cfg: &QuadConfig<T>,
) -> QuadResult<T> {
    integrate_batch(
        |x: &[T], out: &mut [T]| {
            for (o, &t) in out.iter_mut().zip(x) {
                *o = f(t);
            }
        },
        breaks,
        cfg,
    )
}

/// As [`integrate`], with `f` filling `out[i] = f(x[i])` for a whole batch of
/// nodes at once. Each panel (and each pair of children) is one batch, which
/// lets expensive integrands overlap independent evaluations.
pub fn integrate_batch<T: Scalar, F: FnMut(&[T], &mut [T])>(
    mut f: F,
    breaks: &[T],
    cfg: &QuadConfig<T>,
) -> QuadResult<T> {
    let mut out = QuadResult {
        value: T::zero(),
        error: T::zero(),
        evaluations: 0,
        panels: 0,
    };
    if breaks.len() < 2 {
        return out;
    }
    let total = (breaks[breaks.len() - 1] - breaks[0]).abs();
    if total == T::zero() {
        return out;
    }
    let mut x = [T::zero(); 30];
    let mut v = [T::zero(); 30];
    let mut stack: Vec<(T, T, T, T)> = Vec::new();
    for w in breaks.windows(2).rev() {
        if w[1] > w[0] {
            kronrod_nodes(w[0], w[1], &mut x[..15]);
            f(&x[..15], &mut v[..15]);
            let (k, e) = kronrod_combine(w[0], w[1], &v[..15]);
            out.evaluations += 15;
            out.panels += 1;
            stack.push((w[0], w[1], k, e));
        }
    }
    while let Some((a, b, k, e)) = stack.pop() {
        let width = b - a;
        let share = cfg.abs_tol * width / total;
        if e <= share || width <= cfg.min_width || out.panels >= cfg.max_panels {
            out.value += k;
            out.error += e;
            continue;
        }
        let m = (a + b) * T::lit(0.5);
        kronrod_nodes(a, m, &mut x[..15]);
        kronrod_nodes(m, b, &mut x[15..]);
        f(&x, &mut v);
        let (kl, el) = kronrod_combine(a, m, &v[..15]);
        let (kr, er) = kronrod_combine(m, b, &v[15..]);
        out.evaluations += 30;
        out.panels += 2;
        stack.push((m, b, kr, er));
        stack.push((a, m, kl, el));
    }
    out
}

/// Breakpoints for a symmetric integral over `[-x_max, x_max]`: unit panels
/// across `[-core, core]`, then geometrically growing panels outward.
pub fn symmetric_breaks<T: Scalar>(core: T, x_max: T) -> Vec<T> {
    let mut right = Vec::new();
    let core = core.min(x_max);
    let steps = core.ceil().to_usize().unwrap_or(0).max(1);
    for i in 0..=steps {
        right.push(core * T::of_usize(i) / T::of_usize(steps));
    }
    let mut x = core;
    while x < x_max {
        x = (x * T::lit(2.0)).min(x_max);
        right.push(x);
    }
    let mut breaks: Vec<T> = right.iter().rev().map(|&v| -v).collect();
    breaks.extend(right.into_iter().skip(1));
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(
            |x: f64| x.powi(5) - 3.0 * x * x + 1.0,
            &[-1.0, 2.0],
            &QuadConfig::default(),
        );
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.panels, 1);
    }

    #[test]
    fn lorentzian_spike_is_resolved() {
        // total mass of a width-1e-5 Cauchy density, centred off the midpoint
        let y = 1e-5;
        let f = |x: f64| y / std::f64::consts::PI / ((x - 0.123_456).powi(2) + y * y);
        let cfg = QuadConfig {
            abs_tol: 1e-10,
            min_width: 1e-9,
            max_panels: 100_000,
        };
        let r = integrate(f, &[-1.0, 1.0], &cfg);
        let exact = ((1.0 - 0.123_456) / y).atan() / std::f64::consts::PI
            + ((1.0 + 0.123_456) / y).atan() / std::f64::consts::PI;
        assert!((r.value - exact).abs() < 1e-9, "{} vs {}", r.value, exact);
    }

    #[test]
    fn single_precision_runs() {
        let r = integrate(|x: f32| x.cos(), &[0.0, 1.0], &QuadConfig::default());
        assert!((r.value - 1f32.sin()).abs() < 1e-6);
    }

    #[test]
    fn breaks_are_symmetric_and_sorted() {
        let b = symmetric_breaks(3.0f64, 100.0);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b[0], -100.0);
        assert_eq!(*b.last().unwrap(), 100.0);
        for (l, r) in b.iter().zip(b.iter().rev()) {
            assert_eq!(*l, -*r);
        }
    }
}
