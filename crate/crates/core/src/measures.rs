//! Probability measures on the real line: finitely atomic measures, the
//! arcsine law and the `nu_r` family, with their moments and distribution
//! functions.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::scalar::Scalar;

/// Input mass tolerance for [`AtomicMeasure::new`].
pub const INPUT_MASS_TOL: f64 = 1e-9;

/// A finitely atomic probability measure with strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<T> {
    positions: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> AtomicMeasure<T> {
    /// Builds a measure from `(position, weight)` pairs.
    ///
    /// Pairs are sorted and coincident positions merged. Weights must be
    /// positive and sum to one within `1e-9`; the stored weights are then
    /// rescaled to sum to one.
    pub fn new(pairs: &[(T, T)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for &(t, w) in pairs {
            if !t.is_finite() || !w.is_finite() {
                return Err(Error::NonFiniteAtom);
            }
            if w <= T::zero() {
                return Err(Error::NonPositiveWeight {
                    position: t.as_f64(),
                    weight: w.as_f64(),
                });
            }
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite positions"));
        let mut positions: Vec<T> = Vec::with_capacity(sorted.len());
        let mut weights: Vec<T> = Vec::with_capacity(sorted.len());
        for (t, w) in sorted {
            match positions.last() {
                Some(&last) if last == t => *weights.last_mut().expect("parallel vecs") += w,
                _ => {
                    positions.push(t);
                    weights.push(w);
                }
            }
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(INPUT_MASS_TOL, 4.0) {
            return Err(Error::MassNotOne {
                total: total.as_f64(),
            });
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(AtomicMeasure { positions, weights })
    }

    /// The point mass at `a`.
    pub fn point_mass(a: T) -> Self {
        AtomicMeasure {
            positions: vec![a],
            weights: vec![T::one()],
        }
    }

    /// `(delta_{-1} + delta_1) / 2`, whose boundary map is Boole's transformation.
    pub fn boole() -> Self {
        let half = T::lit(0.5);
        AtomicMeasure {
            positions: vec![-T::one(), T::one()],
            weights: vec![half, half],
        }
    }

    /// Already sorted, strictly increasing positions with positive weights;
    /// the mass is left as computed so conservation can be observed.
    pub(crate) fn from_sorted_parts(positions: Vec<T>, weights: Vec<T>) -> Self {
        debug_assert_eq!(positions.len(), weights.len());
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        AtomicMeasure { positions, weights }
    }

    /// Sub-measure made of the atoms with index in `range` (not renormalised).
    pub(crate) fn slice(&self, range: std::ops::Range<usize>) -> Self {
        AtomicMeasure {
            positions: self.positions[range.clone()].to_vec(),
            weights: self.weights[range].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.positions
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn moment(&self, k: u32) -> T {
        self.atoms().map(|(t, w)| w * t.powi(k as i32)).sum()
    }

    pub fn absolute_moment(&self, k: u32) -> T {
        self.atoms().map(|(t, w)| w * t.abs().powi(k as i32)).sum()
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.atoms().map(|(t, w)| w * (t - m) * (t - m)).sum()
    }

    /// Largest `|t|` over the atoms.
    pub fn support_radius(&self) -> T {
        self.positions
            .iter()
            .fold(T::zero(), |acc, t| acc.max(t.abs()))
    }

    /// Index of the atom located exactly at `x`, if any.
    pub fn atom_index(&self, x: T) -> Option<usize> {
        self.positions
            .binary_search_by(|p| p.partial_cmp(&x).expect("finite positions"))
            .ok()
    }

    /// The image under `t -> t / s`, so `dilate(mu^{>n}, sqrt(n)) = mu_n`.
    pub fn dilate(&self, s: T) -> Result<Self> {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::NonPositiveScale(s.as_f64()));
        }
        Ok(AtomicMeasure {
            positions: self.positions.iter().map(|&t| t / s).collect(),
            weights: self.weights.clone(),
        })
    }

    pub fn step_cdf(&self) -> StepCdf<T> {
        let mut acc = T::zero();
        let values = self
            .weights
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect();
        StepCdf {
            jumps: self.positions.clone(),
            values,
        }
    }
}

/// Right-continuous staircase distribution function of an atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf<T> {
    jumps: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> StepCdf<T> {
    pub fn jumps(&self) -> &[T] {
        &self.jumps
    }

    /// Cumulative value just after each jump.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `mu((-inf, x])`.
    pub fn eval(&self, x: T) -> T {
        let k = self.jumps.partition_point(|&j| j <= x);
        if k == 0 {
            T::zero()
        } else {
            self.values[k - 1]
        }
    }

    /// `mu((-inf, x))`.
    pub fn eval_left(&self, x: T) -> T {
        let k = self.jumps.partition_point(|&j| j < x);
        if k == 0 {
            T::zero()
        } else {
            self.values[k - 1]
        }
    }
}

/// Description of one of the supported probability measures.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec<T> {
    Atomic(AtomicMeasure<T>),
    /// `dt / (pi sqrt(2 - t^2))` on `(-sqrt 2, sqrt 2)`.
    Arcsine,
    /// The measure with F-transform `r + sqrt((z - r)^2 - 2)`, `r > 0`.
    NuR(T),
}

impl<T: Scalar> MeasureSpec<T> {
    pub fn nu_r(r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::NonPositiveR(r.as_f64()));
        }
        Ok(MeasureSpec::NuR(r))
    }

    pub fn as_atomic(&self) -> Option<&AtomicMeasure<T>> {
        match self {
            MeasureSpec::Atomic(m) => Some(m),
            _ => None,
        }
    }

    pub fn moment(&self, k: u32) -> T {
        moment(self, k)
    }

    pub fn absolute_moment(&self, k: u32) -> T {
        absolute_moment(self, k)
    }

    pub fn mean(&self) -> T {
        match self {
            MeasureSpec::Atomic(m) => m.mean(),
            _ => moment(self, 1),
        }
    }

    pub fn variance(&self) -> T {
        match self {
            MeasureSpec::Atomic(m) => m.variance(),
            _ => {
                let m1 = moment(self, 1);
                moment(self, 2) - m1 * m1
            }
        }
    }

    /// A radius `R` with the support inside `[-R, R]`.
    pub fn support_radius(&self) -> T {
        match self {
            MeasureSpec::Atomic(m) => m.support_radius(),
            MeasureSpec::Arcsine => T::SQRT_2(),
            MeasureSpec::NuR(r) => {
                let s = nu_r_support_unchecked(*r);
                s.atom.abs().max(s.band.1.abs()).max(s.band.0.abs())
            }
        }
    }
}

impl<T> From<AtomicMeasure<T>> for MeasureSpec<T> {
    fn from(m: AtomicMeasure<T>) -> Self {
        MeasureSpec::Atomic(m)
    }
}

fn moment_quad_config<T: Scalar>() -> QuadConfig<T> {
    QuadConfig {
        abs_tol: T::tol(1e-12, 16.0),
        min_width: T::lit(1e-9),
        max_panels: 10_000,
    }
}

/// Integrates `g(t)` against the continuous part of `spec` (arcsine, or the
/// band of `nu_r`) using `t = c + sqrt(2) sin(theta)`, which removes the
/// square-root behaviour at both band edges.
fn integrate_band<T: Scalar, G: Fn(T) -> T>(spec: &MeasureSpec<T>, g: G) -> T {
    let half_pi = T::FRAC_PI_2();
    let breaks = [-half_pi, T::zero(), half_pi];
    let cfg = moment_quad_config();
    match *spec {
        MeasureSpec::Arcsine => {
            let r = integrate(|th: T| g(T::SQRT_2() * th.sin()), &breaks, &cfg);
            r.value / T::PI()
        }
        MeasureSpec::NuR(r) => {
            let two = T::lit(2.0);
            let r2 = r * r;
            let res = integrate(
                |th: T| {
                    let c = th.cos();
                    let dens = two * c * c / (r2 + two * c * c);
                    g(r + T::SQRT_2() * th.sin()) * dens
                },
                &breaks,
                &cfg,
            );
            res.value / T::PI()
        }
        MeasureSpec::Atomic(_) => unreachable!("atomic measures are summed"),
    }
}

fn integrate_against<T: Scalar, G: Fn(T) -> T>(spec: &MeasureSpec<T>, g: G) -> T {
    match spec {
        MeasureSpec::Atomic(m) => m.atoms().map(|(t, w)| w * g(t)).sum(),
        MeasureSpec::Arcsine => integrate_band(spec, g),
        MeasureSpec::NuR(r) => {
            let s = nu_r_support_unchecked(*r);
            s.atom_mass * g(s.atom) + integrate_band(spec, g)
        }
    }
}

/// `int t^k d(spec)`.
pub fn moment<T: Scalar>(spec: &MeasureSpec<T>, k: u32) -> T {
    integrate_against(spec, |t| t.powi(k as i32))
}

/// `int |t|^k d(spec)`.
pub fn absolute_moment<T: Scalar>(spec: &MeasureSpec<T>, k: u32) -> T {
    integrate_against(spec, |t| t.abs().powi(k as i32))
}

/// Distribution function of the arcsine law on `(-sqrt 2, sqrt 2)`.
pub fn arcsine_cdf<T: Scalar>(x: T) -> T {
    let s2 = T::SQRT_2();
    if x <= -s2 {
        T::zero()
    } else if x >= s2 {
        T::one()
    } else {
        T::lit(0.5) + (x / s2).asin() / T::PI()
    }
}

pub fn arcsine_density<T: Scalar>(x: T) -> T {
    let d = T::lit(2.0) - x * x;
    if d <= T::zero() {
        T::zero()
    } else {
        T::one() / (T::PI() * d.sqrt())
    }
}

/// Support data of `nu_r`: an isolated atom left of a continuous band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuRSupport<T> {
    pub atom: T,
    pub atom_mass: T,
    pub band: (T, T),
}

/// The atom sits at `r - sqrt(2 + r^2)` and carries mass `r / sqrt(2 + r^2)`,
/// the reciprocal derivative of `F` there; the band is `[r - sqrt 2, r + sqrt 2]`.
pub fn nu_r_support<T: Scalar>(r: T) -> Result<NuRSupport<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::NonPositiveR(r.as_f64()));
    }
    Ok(nu_r_support_unchecked(r))
}

fn nu_r_support_unchecked<T: Scalar>(r: T) -> NuRSupport<T> {
    let root = (T::lit(2.0) + r * r).sqrt();
    NuRSupport {
        atom: r - root,
        atom_mass: r / root,
        band: (r - T::SQRT_2(), r + T::SQRT_2()),
    }
}

/// Density of the continuous part of `nu_r`:
/// `sqrt(2 - s^2) / (pi (r^2 + 2 - s^2))` with `s = x - r`.
pub fn nu_r_band_density<T: Scalar>(r: T, x: T) -> T {
    let s = x - r;
    let d = T::lit(2.0) - s * s;
    if d <= T::zero() {
        T::zero()
    } else {
        d.sqrt() / (T::PI() * (r * r + d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn skewed() -> AtomicMeasure<f64> {
        AtomicMeasure::new(&[(-1.0 / 2f64.sqrt(), 2.0 / 3.0), (2f64.sqrt(), 1.0 / 3.0)]).unwrap()
    }

    #[test]
    fn make_atomic_examples() {
        let b = AtomicMeasure::new(&[(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        assert_eq!(b, AtomicMeasure::boole());
        let d = AtomicMeasure::new(&[(0.0, 1.0)]).unwrap();
        assert_eq!(d.positions(), &[0.0]);
        let s = skewed();
        assert_abs_diff_eq!(s.mean(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.moment(2), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn make_atomic_merges_duplicates() {
        let m = AtomicMeasure::new(&[(2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]).unwrap();
        assert_eq!(m.positions(), &[0.0, 2.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn make_atomic_rejects_bad_input() {
        assert!(matches!(
            AtomicMeasure::new(&[(0.0, 1.5), (1.0, -0.5)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            AtomicMeasure::new(&[(0.0, 0.5), (1.0, 0.49)]),
            Err(Error::MassNotOne { .. })
        ));
        assert!(AtomicMeasure::<f64>::new(&[]).is_err());
        // drift below the input tolerance is accepted and normalised away
        let m = AtomicMeasure::new(&[(0.0, 0.5 + 4e-10), (1.0, 0.5)]).unwrap();
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn moments_of_each_kind() {
        let boole: MeasureSpec<f64> = AtomicMeasure::boole().into();
        assert_eq!(moment(&boole, 2), 1.0);
        assert_abs_diff_eq!(
            moment(&MeasureSpec::<f64>::Arcsine, 2),
            1.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            moment(&MeasureSpec::<f64>::Arcsine, 1),
            0.0,
            epsilon = 1e-14
        );
        // even arcsine moments are binom(2k, k) / 2^k
        assert_abs_diff_eq!(
            moment(&MeasureSpec::<f64>::Arcsine, 4),
            1.5,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            moment(&MeasureSpec::<f64>::Arcsine, 6),
            2.5,
            epsilon = 1e-10
        );
    }

    #[test]
    fn absolute_moment_examples() {
        let d0: MeasureSpec<f64> = AtomicMeasure::point_mass(0.0).into();
        assert_eq!(absolute_moment(&d0, 1), 0.0);
        let boole: MeasureSpec<f64> = AtomicMeasure::boole().into();
        assert_eq!(absolute_moment(&boole, 1), 1.0);
        let a: MeasureSpec<f64> = AtomicMeasure::point_mass(1.0 / 2f64.sqrt()).into();
        assert_abs_diff_eq!(
            absolute_moment(&a, 1),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-7
        );
        // E|T| for the arcsine law is 2 sqrt(2) / pi
        assert_abs_diff_eq!(
            absolute_moment(&MeasureSpec::<f64>::Arcsine, 1),
            2.0 * 2f64.sqrt() / std::f64::consts::PI,
            epsilon = 1e-10
        );
    }

    #[test]
    fn nu_r_is_standardized() {
        for r in [0.25, 1.0, 2.0] {
            let s = MeasureSpec::nu_r(r).unwrap();
            assert_abs_diff_eq!(moment(&s, 0), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(s.mean(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(s.variance(), 1.0, epsilon = 1e-10);
        }
        assert!(MeasureSpec::nu_r(0.0).is_err());
    }

    #[test]
    fn dilate_examples() {
        let b = AtomicMeasure::boole();
        assert_eq!(b.dilate(1.0).unwrap(), b);
        let h = b.dilate(2.0).unwrap();
        assert_eq!(h.positions(), &[-0.5, 0.5]);
        assert_eq!(h.weights(), &[0.5, 0.5]);
        let d0 = AtomicMeasure::point_mass(0.0);
        assert_eq!(d0.dilate(7.0).unwrap(), d0);
        assert!(matches!(b.dilate(0.0), Err(Error::NonPositiveScale(_))));
    }

    #[test]
    fn step_cdf_examples() {
        let c = AtomicMeasure::<f64>::boole().step_cdf();
        assert_eq!(c.eval(0.0), 0.5);
        assert_eq!(c.eval_left(1.0), 0.5);
        assert_eq!(c.eval(1.0), 1.0);
        assert_eq!(c.eval(-1.0), 0.5);
        assert_eq!(c.eval_left(-1.0), 0.0);
        assert_eq!(AtomicMeasure::point_mass(0.0).step_cdf().eval(-0.1), 0.0);
    }

    #[test]
    fn arcsine_cdf_examples() {
        assert_abs_diff_eq!(arcsine_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(arcsine_cdf(2f64.sqrt()), 1.0);
        assert_eq!(arcsine_cdf(-2.0), 0.0);
        assert_abs_diff_eq!(arcsine_cdf(1.0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn nu_r_support_examples() {
        let s = nu_r_support(1.0).unwrap();
        assert_abs_diff_eq!(s.atom, 1.0 - 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.atom, -0.732_050_8, epsilon = 1e-7);
        assert_abs_diff_eq!(s.atom_mass, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.band.0, 1.0 - 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.band.1, 1.0 + 2f64.sqrt(), epsilon = 1e-15);
        let s2 = nu_r_support(2.0).unwrap();
        assert_abs_diff_eq!(s2.atom, 2.0 - 6f64.sqrt(), epsilon = 1e-15);
        assert!(nu_r_support(1e-9).unwrap().atom_mass < 1e-8);
        assert!(matches!(nu_r_support(-1.0), Err(Error::NonPositiveR(_))));
    }

    #[test]
    fn nu_r_band_plus_atom_is_one() {
        for r in [0.1, 1.0, 2.0, 5.0] {
            let s = nu_r_support(r).unwrap();
            let band = integrate(
                |x: f64| nu_r_band_density(r, x),
                &[s.band.0, r, s.band.1],
                &QuadConfig {
                    abs_tol: 1e-12,
                    min_width: 1e-12,
                    max_panels: 100_000,
                },
            );
            assert_abs_diff_eq!(s.atom_mass + band.value, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn single_precision_measure() {
        let m = AtomicMeasure::<f32>::new(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(m.variance(), 1.0);
        assert!((moment(&MeasureSpec::<f32>::Arcsine, 2) - 1.0).abs() < 1e-5);
    }
}
