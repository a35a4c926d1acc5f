//! Distances to the arcsine law, the explicit Berry-Esseen bounds, and the
//! error function `eps_n`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::inversion::{
    kolmogorov_exact, kolmogorov_grid, kolmogorov_window, stieltjes_cdf_many, stieltjes_cdf_with,
    uniform_grid, CdfCurve, InversionConfig,
};
use crate::measures::{AtomicMeasure, MeasureSpec};
use crate::scalar::{sqrt_cut, Scalar};
use crate::transforms::{
    arcsine_f, constants_c_d, monotone_power_exact, monotone_power_tails, power_atom_count,
    BoundConstants, FTransform, DEFAULT_ATOM_BUDGET,
};

/// Tolerance on mean and variance when a measure must be standardized.
pub const STANDARDIZED_TOL: f64 = 1e-9;

// Below this, c is treated as zero.
const C_ZERO: f64 = 1e-12;

pub fn check_standardized<T: Scalar>(mean: T, variance: T) -> Result<()> {
    let tol = T::lit(STANDARDIZED_TOL);
    if (mean.abs() <= tol) && ((variance - T::one()).abs() <= tol) {
        Ok(())
    } else {
        Err(Error::NotStandardized {
            mean: mean.as_f64(),
            variance: variance.as_f64(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundPart {
    /// `71 c^(1/4) n^(-1/8)`, for `c > 0`.
    One,
    /// `200 sqrt(d + 3(1 + m_2)^2) n^(-1/4)`, for `c > 0`.
    Two,
    /// `200 n^(-1/4)`, for `c = 0`.
    Three,
}

impl BoundPart {
    pub fn number(self) -> u8 {
        match self {
            BoundPart::One => 1,
            BoundPart::Two => 2,
            BoundPart::Three => 3,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(BoundPart::One),
            2 => Some(BoundPart::Two),
            3 => Some(BoundPart::Three),
            _ => None,
        }
    }

    /// Part 3 when `c = 0`; otherwise part 2 if the second-level constants are
    /// wanted, else part 1.
    pub fn select<T: Scalar>(k: &BoundConstants<T>, use_d: bool) -> Self {
        if k.c <= T::lit(C_ZERO) {
            BoundPart::Three
        } else if use_d {
            BoundPart::Two
        } else {
            BoundPart::One
        }
    }
}

impl fmt::Display for BoundPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport<T> {
    pub part: BoundPart,
    pub n: u64,
    pub bound_value: T,
    /// The bound holds for `n > threshold_n`.
    pub threshold_n: T,
    pub inputs: BoundConstants<T>,
    pub applicable: bool,
}

/// `K = d + 3(1 + m_2(nu))^2`.
pub fn part_two_k<T: Scalar>(k: &BoundConstants<T>) -> T {
    let s = T::one() + k.m2_nu;
    k.d + T::lit(3.0) * s * s
}

/// The explicit bound and threshold of the requested part for `mu_n`.
pub fn berry_esseen_bound<T: Scalar>(
    m: &AtomicMeasure<T>,
    n: u64,
    part: BoundPart,
) -> Result<BoundReport<T>> {
    check_standardized(m.mean(), m.variance())?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let k = constants_c_d(m);
    let c_zero = k.c <= T::lit(C_ZERO);
    let nf = T::from_u64(n).expect("n representable");
    let (bound_value, threshold_n) = match part {
        BoundPart::One | BoundPart::Two if c_zero => {
            return Err(Error::PartNotApplicable {
                part: part.number(),
                c: k.c.as_f64(),
            })
        }
        BoundPart::Three if !c_zero => {
            return Err(Error::PartNotApplicable {
                part: 3,
                c: k.c.as_f64(),
            })
        }
        BoundPart::One => {
            let eight = T::lit(8.0);
            let a = (eight * (T::lit(3.0) * k.c).sqrt()).powi(4);
            let b = (eight * k.c * k.c.sqrt()).powi(-4);
            (
                T::lit(71.0) * k.c.powf(T::lit(0.25)) * nf.powf(T::lit(-0.125)),
                a.max(b),
            )
        }
        BoundPart::Two => {
            let kk = part_two_k(&k);
            let four = T::lit(4.0);
            let th = (four * k.m_nu * k.m_nu)
                .max(four * k.m2_nu * k.m2_nu)
                .max(T::lit(12288.0) * kk * kk);
            (T::lit(200.0) * kk.sqrt() * nf.powf(T::lit(-0.25)), th)
        }
        BoundPart::Three => (T::lit(200.0) * nf.powf(T::lit(-0.25)), T::lit(12288.0)),
    };
    Ok(BoundReport {
        part,
        n,
        bound_value,
        threshold_n,
        inputs: k,
        applicable: nf > threshold_n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Numeric,
    /// Exact while the atom count stays within the crossover, numeric beyond.
    Auto,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Numeric => "numeric",
            Method::Auto => "auto",
        })
    }
}

/// Grid and smoothing height for numeric distances.
#[derive(Debug, Clone, Copy)]
pub struct NumericConfig<T> {
    pub y: T,
    pub x_min: T,
    pub x_max: T,
    pub points: usize,
    pub inversion: InversionConfig<T>,
}

impl<T: Scalar> Default for NumericConfig<T> {
    fn default() -> Self {
        NumericConfig {
            y: T::lit(1e-5),
            x_min: T::lit(-4.0),
            x_max: T::lit(4.0),
            points: 16001,
            inversion: InversionConfig::default(),
        }
    }
}

impl<T: Scalar> NumericConfig<T> {
    pub fn grid(&self) -> Vec<T> {
        uniform_grid(self.x_min, self.x_max, self.points)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DistanceConfig<T> {
    pub budget: usize,
    /// Largest atom count `Auto` still computes exactly.
    pub crossover: usize,
    pub numeric: NumericConfig<T>,
}

impl<T: Scalar> Default for DistanceConfig<T> {
    fn default() -> Self {
        DistanceConfig {
            budget: DEFAULT_ATOM_BUDGET,
            crossover: 1 << 14,
            numeric: NumericConfig::default(),
        }
    }
}

/// How a numeric distance was resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution<T> {
    pub y: T,
    pub points: usize,
    pub max_spacing: T,
    /// Largest one-cell increment of either curve.
    pub grid_slack: T,
    /// Where the grid sup was attained.
    pub at: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<T> {
    pub n: u64,
    pub distance: T,
    /// `Exact` or `Numeric`, never `Auto`.
    pub method: Method,
    pub resolution: Option<Resolution<T>>,
}

/// `||C_{mu_n} - C_gamma||_inf` for the normalised power `mu_n`.
pub fn clt_distance<T: Scalar>(
    spec: &MeasureSpec<T>,
    n: u64,
    method: Method,
    cfg: &DistanceConfig<T>,
) -> Result<RatePoint<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let method = match (method, spec) {
        (Method::Auto, MeasureSpec::Atomic(m)) => {
            let limit = cfg.crossover.min(cfg.budget) as f64;
            if n <= u32::MAX as u64 && power_atom_count(m.len(), n as u32) <= limit {
                Method::Exact
            } else {
                Method::Numeric
            }
        }
        (Method::Auto, _) => Method::Numeric,
        (m, _) => m,
    };
    match method {
        Method::Exact => {
            let m = spec.as_atomic().ok_or(Error::NotAtomic)?;
            let n32 = u32::try_from(n).map_err(|_| Error::AtomBudgetExceeded {
                required: f64::INFINITY,
                budget: cfg.budget,
            })?;
            let p = monotone_power_exact(m, n32, cfg.budget)?;
            let root_n = T::from_u64(n).expect("n representable").sqrt();
            let distance = kolmogorov_exact(&p.dilate(root_n)?);
            Ok(RatePoint {
                n,
                distance,
                method: Method::Exact,
                resolution: None,
            })
        }
        _ => {
            let (curve, reference) = numeric_curves(spec, n, &cfg.numeric)?;
            let g = kolmogorov_grid(&curve, &reference)?;
            Ok(RatePoint {
                n,
                distance: g.distance,
                method: Method::Numeric,
                resolution: Some(Resolution {
                    y: cfg.numeric.y,
                    points: cfg.numeric.points,
                    max_spacing: g.max_spacing,
                    grid_slack: g.slack,
                    at: g.at,
                }),
            })
        }
    }
}

/// Kolmogorov distance of `mu_n` to the arcsine law over the two outer
/// windows where the `k` extreme atoms on each side fix the CDF exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDistance<T> {
    pub n: u64,
    /// Sup over `(-inf, left_end] U [right_start, inf)`, a lower bound for
    /// the full distance and equal to it when `complete`.
    pub distance: T,
    pub left_end: T,
    pub right_start: T,
    pub complete: bool,
}

/// [`EdgeDistance`] for an atomic seed. Runs in `O(n k)`, so it reaches
/// `n` far beyond what [`monotone_power_exact`] can hold in memory.
pub fn edge_distance<T: Scalar>(m: &AtomicMeasure<T>, n: u32, k: usize) -> Result<EdgeDistance<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let tails = monotone_power_tails(m, n, k)?;
    let root_n = T::from_u64(n as u64).expect("n representable").sqrt();
    let left = tails.left.dilate(root_n)?;
    if tails.complete {
        return Ok(EdgeDistance {
            n: n as u64,
            distance: kolmogorov_exact(&left),
            left_end: T::infinity(),
            right_start: T::neg_infinity(),
            complete: true,
        });
    }
    let right = tails.right.dilate(root_n)?;
    let before = T::one() - right.total_mass();
    Ok(EdgeDistance {
        n: n as u64,
        distance: kolmogorov_window(&left, T::zero()).max(kolmogorov_window(&right, before)),
        left_end: left.positions()[left.len() - 1],
        right_start: right.positions()[0],
        complete: false,
    })
}

/// Recovered CDF of `mu_n` and the arcsine CDF, on the configured grid.
pub fn numeric_curves<T: Scalar>(
    spec: &MeasureSpec<T>,
    n: u64,
    cfg: &NumericConfig<T>,
) -> Result<(CdfCurve<T>, CdfCurve<T>)> {
    let f = FTransform::new(spec);
    let grid = cfg.grid();
    let curve = stieltjes_cdf_many(
        |zs| f.normalized_power_many(n, zs),
        cfg.y,
        &grid,
        &cfg.inversion,
    )?;
    Ok((curve, CdfCurve::arcsine(&grid)?))
}

/// `sup |C_gamma smoothed at y - C_gamma|` on the configured grid: how far
/// Stieltjes smoothing alone moves a CDF with square-root edges.
pub fn smoothing_slack<T: Scalar>(cfg: &NumericConfig<T>) -> Result<T> {
    let grid = cfg.grid();
    let smoothed = stieltjes_cdf_with(arcsine_f, cfg.y, &grid, &cfg.inversion)?;
    Ok(kolmogorov_grid(&smoothed, &CdfCurve::arcsine(&grid)?)?.distance)
}

/// Outcome of checking a numeric distance against a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginCheck<T> {
    pub n: u64,
    pub distance: T,
    pub bound: T,
    /// `distance - bound`.
    pub margin: T,
    /// Grid slack plus smoothing slack.
    pub slack: T,
    pub points: usize,
}

impl<T: Scalar> MarginCheck<T> {
    /// The bound holds with the margin exceeding three times the numeric slack.
    pub fn resolved(&self) -> bool {
        self.margin > T::lit(3.0) * self.slack
    }
}

/// Compares the numeric distance of `mu_n` with `bound`, halving the grid
/// spacing (up to `max_refinements` times) until the margin exceeds three
/// times the numeric slack.
pub fn lower_bound_margin<T: Scalar>(
    spec: &MeasureSpec<T>,
    n: u64,
    bound: T,
    cfg: &NumericConfig<T>,
    max_refinements: usize,
) -> Result<MarginCheck<T>> {
    let mut cfg = *cfg;
    let mut refinements = 0;
    loop {
        let (curve, reference) = numeric_curves(spec, n, &cfg)?;
        let g = kolmogorov_grid(&curve, &reference)?;
        let slack = g.slack + smoothing_slack(&cfg)?;
        let check = MarginCheck {
            n,
            distance: g.distance,
            bound,
            margin: g.distance - bound,
            slack,
            points: cfg.points,
        };
        if check.resolved() || refinements >= max_refinements {
            return Ok(check);
        }
        cfg.points = 2 * cfg.points - 1;
        refinements += 1;
    }
}

/// `eps_n(z) = F_{mu_n}(z)^2 - z^2 + 2`.
pub fn eps_n<T: Scalar>(spec: &MeasureSpec<T>, n: u64, z: Complex<T>) -> Result<Complex<T>> {
    let w = crate::transforms::normalized_power_f(spec, n, z)?;
    Ok(eps_from_power(w, z))
}

#[inline]
pub fn eps_from_power<T: Scalar>(w: Complex<T>, z: Complex<T>) -> Complex<T> {
    w * w - z * z + T::lit(2.0)
}

/// [`eps_n`] at every point of `zs`, in place, with the orbits advanced in
/// lockstep. Points must lie in the upper half-plane.
pub fn eps_n_many<T: Scalar>(f: &FTransform<T>, n: u64, zs: &mut [Complex<T>]) {
    let mut buf = [Complex::new(T::zero(), T::zero()); 32];
    for chunk in zs.chunks_mut(32) {
        let w = &mut buf[..chunk.len()];
        w.copy_from_slice(chunk);
        f.normalized_power_many(n, w);
        for (z, &w) in chunk.iter_mut().zip(w.iter()) {
            *z = eps_from_power(w, *z);
        }
    }
}

/// `eps_n` as the telescoping sum `sum_{j<n} r_n(F_n^j(z))`, where
/// `F_n(w) = F(sqrt(n) w)/sqrt(n)` and `r_n(w) = F_n(w)^2 - w^2 + 2/n`.
pub fn eps_n_series<T: Scalar>(spec: &MeasureSpec<T>, n: u64, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.im > T::zero()) {
        return Err(Error::RealAxisInput {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let f = FTransform::new(spec);
    let nf = T::from_u64(n).expect("n representable");
    let s = nf.sqrt();
    let two_over_n = T::lit(2.0) / nf;
    let mut w = z;
    let mut acc = Complex::new(T::zero(), T::zero());
    for _ in 0..n {
        let next = f.eval(w * s) / s;
        acc += next * next - w * w + two_over_n;
        w = next;
    }
    Ok(acc)
}

/// F-transform of the normalised power of `nu_1`: `n^(-1/2) + sqrt((z - n^(-1/2))^2 - 2)`.
pub fn nu1_closed_form_f<T: Scalar>(n: u64, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.im > T::zero()) {
        return Err(Error::RealAxisInput {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let s = T::one() / T::from_u64(n).expect("n representable").sqrt();
    let w = z - s;
    Ok(sqrt_cut(w * w - T::lit(2.0)) + s)
}

/// `1 / (sqrt(2) pi n^(1/4))`.
pub fn nu1_lower_bound<T: Scalar>(n: u64) -> T {
    let nf = T::from_u64(n.max(1)).expect("n representable");
    T::one() / (T::SQRT_2() * T::PI() * nf.powf(T::lit(0.25)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit<T> {
    pub slope: T,
    pub intercept: T,
}

/// Ordinary least squares of `log(distance)` against `log(n)`.
pub fn rate_fit<T: Scalar>(points: &[RatePoint<T>]) -> Result<RateFit<T>> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(p) = points.iter().find(|p| !(p.distance > T::zero())) {
        return Err(Error::NonPositiveDistance {
            n: p.n,
            distance: p.distance.as_f64(),
        });
    }
    let k = T::of_usize(points.len());
    let xs: Vec<T> = points
        .iter()
        .map(|p| T::from_u64(p.n).unwrap().ln())
        .collect();
    let ys: Vec<T> = points.iter().map(|p| p.distance.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / k;
    let my = ys.iter().copied().sum::<T>() / k;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == T::zero() {
        return Err(Error::InvalidArgument(
            "rate points share a single n".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
    })
}
