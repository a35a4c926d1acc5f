//! Stieltjes inversion, Kolmogorov distances, and the two integral bounds
//! used to compare a measure with the arcsine law.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{arcsine_cdf, AtomicMeasure};
use crate::quad::{integrate, integrate_batch, symmetric_breaks, QuadConfig};
use crate::scalar::{sqrt_cut, Scalar};
use crate::transforms::arcsine_f;

/// A CDF sampled on a grid.
///
/// `y` is the height of the line the curve was recovered from; a curve sampled
/// from a closed form carries `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve<T> {
    pub x: Vec<T>,
    pub cdf: Vec<T>,
    pub y: T,
}

impl<T: Scalar> CdfCurve<T> {
    /// Samples `f` on `grid`.
    pub fn sample<F: Fn(T) -> T>(grid: &[T], f: F) -> Result<Self> {
        check_grid(grid)?;
        Ok(CdfCurve {
            x: grid.to_vec(),
            cdf: grid.iter().map(|&x| f(x)).collect(),
            y: T::zero(),
        })
    }

    /// The arcsine CDF on `grid`.
    pub fn arcsine(grid: &[T]) -> Result<Self> {
        Self::sample(grid, arcsine_cdf)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Largest grid spacing.
    pub fn max_spacing(&self) -> T {
        self.x
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), T::max)
    }

    /// Largest increment of the curve over one grid cell.
    pub fn max_increment(&self) -> T {
        self.cdf
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(T::zero(), T::max)
    }
}

/// `points` equally spaced values from `a` to `b` inclusive.
pub fn uniform_grid<T: Scalar>(a: T, b: T, points: usize) -> Vec<T> {
    if points < 2 {
        return vec![a];
    }
    let step = (b - a) / T::of_usize(points - 1);
    (0..points)
        .map(|k| {
            if k + 1 == points {
                b
            } else {
                a + step * T::of_usize(k)
            }
        })
        .collect()
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::UnsortedGrid { index: i + 1 });
        }
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite grid value".into()));
    }
    Ok(())
}

/// Accuracy knobs for [`stieltjes_cdf`].
#[derive(Debug, Clone, Copy)]
pub struct InversionConfig<T> {
    /// Absolute error target for the integral over one grid cell.
    pub cell_tol: T,
    /// Smallest sub-panel width, as a multiple of `y`.
    pub min_width_factor: T,
    pub max_panels_per_cell: usize,
}

impl<T: Scalar> Default for InversionConfig<T> {
    fn default() -> Self {
        InversionConfig {
            cell_tol: T::tol(1e-8, 64.0),
            min_width_factor: T::lit(1e-2),
            max_panels_per_cell: 4000,
        }
    }
}

/// CDF of the measure with F-transform `f`, smoothed at height `y`:
/// `cdf(x_k) = int_{-inf}^{x_k} -Im(1/F(s + iy)) / pi ds`.
///
/// The density is integrated cell by cell with adaptive Gauss-Kronrod, which
/// resolves Poisson peaks of width `y` sitting between grid points, and the
/// cell integrals are accumulated. The mass left of the grid is taken to be
/// that of a point mass at 0. Values are clamped to `[0, 1]`.
pub fn stieltjes_cdf<T, F>(f: F, y: T, grid: &[T]) -> Result<CdfCurve<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    stieltjes_cdf_with(f, y, grid, &InversionConfig::default())
}

pub fn stieltjes_cdf_with<T, F>(
    f: F,
    y: T,
    grid: &[T],
    cfg: &InversionConfig<T>,
) -> Result<CdfCurve<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    stieltjes_cdf_batch(
        |xs: &[T], out: &mut [T]| {
            for (o, &s) in out.iter_mut().zip(xs) {
                *o = -f(Complex::new(s, y)).inv().im / T::PI();
            }
        },
        y,
        grid,
        cfg,
    )
}

/// [`stieltjes_cdf`] for an evaluator that maps whole batches of points at
/// once: `f(zs)` replaces every `z` in `zs` by `F(z)`.
pub fn stieltjes_cdf_many<T, F>(
    f: F,
    y: T,
    grid: &[T],
    cfg: &InversionConfig<T>,
) -> Result<CdfCurve<T>>
where
    T: Scalar,
    F: Fn(&mut [Complex<T>]) + Sync,
{
    stieltjes_cdf_batch(
        |xs: &[T], out: &mut [T]| {
            let mut zs = [Complex::new(T::zero(), T::zero()); 30];
            let zs = &mut zs[..xs.len()];
            for (z, &s) in zs.iter_mut().zip(xs) {
                *z = Complex::new(s, y);
            }
            f(zs);
            for (o, z) in out.iter_mut().zip(zs.iter()) {
                *o = -z.inv().im / T::PI();
            }
        },
        y,
        grid,
        cfg,
    )
}

fn stieltjes_cdf_batch<T, D>(
    density: D,
    y: T,
    grid: &[T],
    cfg: &InversionConfig<T>,
) -> Result<CdfCurve<T>>
where
    T: Scalar,
    D: Fn(&[T], &mut [T]) + Sync,
{
    if !(y > T::zero()) || !y.is_finite() {
        return Err(Error::NonPositiveY(y.as_f64()));
    }
    check_grid(grid)?;
    let qc = QuadConfig {
        abs_tol: cfg.cell_tol,
        min_width: y * cfg.min_width_factor,
        max_panels: cfg.max_panels_per_cell,
    };
    let cells: Vec<T> = grid
        .par_windows(2)
        .map(|w| integrate_batch(&density, w, &qc).value)
        .collect();
    let x0 = grid[0];
    let mut acc = T::lit(0.5) + (x0 / y).atan() / T::PI();
    let mut cdf = Vec::with_capacity(grid.len());
    cdf.push(acc.max(T::zero()).min(T::one()));
    for c in cells {
        acc += c;
        cdf.push(acc.max(T::zero()).min(T::one()));
    }
    Ok(CdfCurve {
        x: grid.to_vec(),
        cdf,
        y,
    })
}

/// `sup_x |C_m(x) - C_arcsine(x)|`, exactly.
///
/// Between atoms the step CDF is flat and the arcsine CDF monotone, so the sup
/// is attained as a one-sided limit at an atom; `+-sqrt 2` are checked too.
pub fn kolmogorov_exact<T: Scalar>(m: &AtomicMeasure<T>) -> T {
    let mut best = T::zero();
    let mut cum = T::zero();
    for (t, w) in m.atoms() {
        let g = arcsine_cdf(t);
        best = best.max((g - cum).abs());
        cum += w;
        best = best.max((g - cum).abs());
    }
    let step = m.step_cdf();
    for edge in [-T::SQRT_2(), T::SQRT_2()] {
        let g = arcsine_cdf(edge);
        best = best.max((g - step.eval(edge)).abs());
        best = best.max((g - step.eval_left(edge)).abs());
    }
    best
}

/// `sup |C - C_gamma|` over the part of the line where a run of consecutive
/// atoms pins the staircase `C` down: from the first atom (left limit
/// included) to the last (right limit included). `before` is the value of `C`
/// just left of the first atom.
pub fn kolmogorov_window<T: Scalar>(m: &AtomicMeasure<T>, before: T) -> T {
    let mut best = T::zero();
    let mut cum = before;
    for (t, w) in m.atoms() {
        let g = arcsine_cdf(t);
        best = best.max((g - cum).abs());
        cum += w;
        best = best.max((g - cum).abs());
    }
    if let (Some(&lo), Some(&hi)) = (m.positions().first(), m.positions().last()) {
        let step = m.step_cdf();
        for edge in [-T::SQRT_2(), T::SQRT_2()] {
            if edge > lo && edge < hi {
                let g = arcsine_cdf(edge);
                best = best.max((g - before - step.eval(edge)).abs());
            }
        }
    }
    best
}

/// Sup distance between two curves on a shared grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDistance<T> {
    pub distance: T,
    /// Grid point where the sup is attained.
    pub at: T,
    pub max_spacing: T,
    /// How much the sup between grid points can exceed `distance` when both
    /// curves are nondecreasing: on `[x_k, x_k+1]` the difference lies in
    /// `[a_k - b_k+1, a_k+1 - b_k]`.
    pub slack: T,
}

pub fn kolmogorov_grid<T: Scalar>(a: &CdfCurve<T>, b: &CdfCurve<T>) -> Result<GridDistance<T>> {
    if a.x != b.x || a.cdf.len() != a.x.len() || b.cdf.len() != b.x.len() {
        return Err(Error::GridMismatch);
    }
    let mut distance = T::zero();
    let mut at = a.x.first().copied().unwrap_or_else(T::zero);
    for ((&x, &p), &q) in a.x.iter().zip(&a.cdf).zip(&b.cdf) {
        let d = (p - q).abs();
        if d > distance {
            distance = d;
            at = x;
        }
    }
    let envelope = a
        .cdf
        .windows(2)
        .zip(b.cdf.windows(2))
        .map(|(p, q)| (p[0] - q[1]).abs().max((p[1] - q[0]).abs()))
        .fold(distance, T::max);
    Ok(GridDistance {
        distance,
        at,
        max_spacing: a.max_spacing(),
        slack: envelope - distance,
    })
}

/// Upper end of the admissible `y` range in the Bai-type bound, `1 / (4 sqrt 3)`.
pub fn bai_y_max<T: Scalar>() -> T {
    T::one() / (T::lit(4.0) * T::lit(3.0).sqrt())
}

/// What the tail estimate needs to know about the measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailInfo<T> {
    pub mean: T,
    pub second_moment: T,
    pub support_radius: T,
}

impl<T: Scalar> TailInfo<T> {
    pub fn of(m: &AtomicMeasure<T>) -> Self {
        TailInfo {
            mean: m.mean(),
            second_moment: m.moment(2),
            support_radius: m.support_radius(),
        }
    }
}

/// Pieces of the right-hand side `int |1/F_mu - 1/F_gamma| dx + 11 sqrt(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaiRhs<T> {
    /// Quadrature over `[-x_max, x_max]`.
    pub integral: T,
    /// Bound on the part of the integral beyond `x_max`.
    pub tail_bound: T,
    pub x_max: T,
    pub sqrt_term: T,
    /// `integral + tail_bound + sqrt_term`.
    pub total: T,
}

const TAIL_TARGET: f64 = 1e-8;

fn integral_quad_config<T: Scalar>() -> QuadConfig<T> {
    QuadConfig {
        abs_tol: T::tol(1e-9, 64.0),
        min_width: T::lit(1e-6),
        max_panels: 200_000,
    }
}

/// Integrates with an absolute tolerance per initial panel rather than
/// shared across the whole (very long) range.
fn integrate_panels<T: Scalar, G: FnMut(T) -> T>(mut g: G, breaks: &[T]) -> T {
    let cfg = integral_quad_config::<T>();
    breaks
        .windows(2)
        .map(|w| integrate(&mut g, w, &cfg).value)
        .sum()
}

/// Upper bound for the Kolmogorov distance to the arcsine law:
/// `int |1/F_mu(x+iy) - 1/F_gamma(x+iy)| dx + 11 sqrt(y)`.
///
/// For `|x| > R` both Cauchy transforms satisfy
/// `|G(z) - 1/z - mean/z^2| <= m_2 / (x^2 (|x| - R))`, which bounds the dropped
/// tails by `2|mean|/X + 2(m_2 + 1)/(X (X - R))`; `X` starts at
/// `max(10, 4R)` and doubles until that is below `1e-8`.
pub fn bai_rhs_arcsine<T, F>(f_mu: F, tail: TailInfo<T>, y: T) -> Result<BaiRhs<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let upper = bai_y_max::<T>();
    if !(y > T::zero() && y < upper) {
        return Err(Error::YOutOfRange {
            y: y.as_f64(),
            upper: upper.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let r = tail.support_radius.max(T::SQRT_2());
    let bound =
        |x: T| two * tail.mean.abs() / x + two * (tail.second_moment + T::one()) / (x * (x - r));
    let mut x_max = T::lit(10.0).max(T::lit(4.0) * r);
    while bound(x_max) >= T::lit(TAIL_TARGET) {
        x_max *= two;
    }
    let breaks = symmetric_breaks(T::lit(4.0).max(r.ceil() + T::one()), x_max);
    let integral = integrate_panels(
        |x| {
            let z = Complex::new(x, y);
            (f_mu(z).inv() - arcsine_f(z).inv()).norm()
        },
        &breaks,
    );
    let tail_bound = bound(x_max);
    let sqrt_term = T::lit(11.0) * y.sqrt();
    Ok(BaiRhs {
        integral,
        tail_bound,
        x_max,
        sqrt_term,
        total: integral + tail_bound + sqrt_term,
    })
}

/// Left-hand side of the perturbation lemma,
/// `int |1/sqrt(z^2 - 2 + eps(z)) - 1/sqrt(z^2 - 2)| dx` along `Im z = y`,
/// with the dropped tails bounded by `3y / (X - sqrt 2 - 1)^2`.
///
/// The hypothesis `|eps| < 3y/2` is checked at every quadrature node.
pub fn lemma22_lhs<T, E>(eps: E, y: T) -> Result<BaiRhs<T>>
where
    T: Scalar,
    E: Fn(Complex<T>) -> Complex<T>,
{
    lemma22_lhs_many(
        |zs: &mut [Complex<T>]| {
            for z in zs.iter_mut() {
                *z = eps(*z);
            }
        },
        y,
    )
}

/// [`lemma22_lhs`] for an evaluator that replaces every `z` in a batch by
/// `eps(z)`.
pub fn lemma22_lhs_many<T, E>(eps: E, y: T) -> Result<BaiRhs<T>>
where
    T: Scalar,
    E: Fn(&mut [Complex<T>]),
{
    if !(y > T::zero()) || !y.is_finite() {
        return Err(Error::NonPositiveY(y.as_f64()));
    }
    let two = T::lit(2.0);
    let limit = T::lit(1.5) * y;
    let shift = T::SQRT_2() + T::one();
    let bound = |x: T| T::lit(3.0) * y / ((x - shift) * (x - shift));
    let mut x_max = T::lit(10.0);
    while bound(x_max) >= T::lit(TAIL_TARGET) {
        x_max *= two;
    }
    let mut violation: Option<(T, T)> = None;
    let breaks = symmetric_breaks(T::lit(4.0), x_max);
    let cfg = integral_quad_config::<T>();
    let mut es = [Complex::new(T::zero(), T::zero()); 30];
    let mut integrand = |xs: &[T], out: &mut [T]| {
        let es = &mut es[..xs.len()];
        for (e, &x) in es.iter_mut().zip(xs) {
            *e = Complex::new(x, y);
        }
        eps(es);
        for ((o, &x), &e) in out.iter_mut().zip(xs).zip(es.iter()) {
            let mag = e.norm();
            if !(mag < limit) {
                if violation.is_none() {
                    violation = Some((x, mag));
                }
                *o = T::zero();
                continue;
            }
            let z = Complex::new(x, y);
            let w = z * z - two;
            *o = (sqrt_cut(w + e).inv() - sqrt_cut(w).inv()).norm();
        }
    };
    let integral = breaks
        .windows(2)
        .map(|w| integrate_batch(&mut integrand, w, &cfg).value)
        .sum();
    if let Some((x, mag)) = violation {
        return Err(Error::EpsilonTooLarge {
            x: x.as_f64(),
            magnitude: mag.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let tail_bound = bound(x_max);
    Ok(BaiRhs {
        integral,
        tail_bound,
        x_max,
        sqrt_term: T::zero(),
        total: integral + tail_bound,
    })
}
