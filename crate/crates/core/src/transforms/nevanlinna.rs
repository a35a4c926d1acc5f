use num_complex::Complex;

use crate::measures::AtomicMeasure;
use crate::roots::increasing_root;
use crate::scalar::Scalar;

/// Nevanlinna form `F(z) = z - shift + sum_k mass_k / (pole_k - z)` of the
/// F-transform of an atomic measure.
///
/// `shift` is the mean; the poles are the real zeros of the Cauchy transform,
/// one strictly between each pair of consecutive atoms, and the masses sum to
/// the variance. A point mass has no poles.
#[derive(Debug, Clone, PartialEq)]
pub struct NevanlinnaData<T> {
    shift: T,
    poles: Vec<T>,
    masses: Vec<T>,
}

impl<T: Scalar> NevanlinnaData<T> {
    pub fn new(shift: T, poles: Vec<T>, masses: Vec<T>) -> Self {
        debug_assert_eq!(poles.len(), masses.len());
        debug_assert!(poles.windows(2).all(|w| w[0] < w[1]));
        NevanlinnaData {
            shift,
            poles,
            masses,
        }
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn poles(&self) -> &[T] {
        &self.poles
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    /// `nu(R)`, equal to the variance of the source measure.
    pub fn total_mass(&self) -> T {
        self.masses.iter().copied().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.poles.is_empty()
    }

    /// `int |t| d nu`.
    pub fn first_absolute_moment(&self) -> T {
        self.poles
            .iter()
            .zip(&self.masses)
            .map(|(&p, &m)| p.abs() * m)
            .sum()
    }

    /// `nu([-k, k])`.
    pub fn mass_within(&self, k: T) -> T {
        self.poles
            .iter()
            .zip(&self.masses)
            .filter(|(p, _)| p.abs() <= k)
            .map(|(_, &m)| m)
            .sum()
    }

    /// `int d nu(t) / (t - z)`.
    #[inline]
    pub fn cauchy_part(&self, z: Complex<T>) -> Complex<T> {
        let (mut re, mut im) = (T::zero(), T::zero());
        for (&p, &m) in self.poles.iter().zip(&self.masses) {
            // m / (p - z) = m (p - x + iy) / |p - z|^2
            let dx = p - z.re;
            let r = m / (dx * dx + z.im * z.im);
            re += dx * r;
            im += z.im * r;
        }
        Complex::new(re, im)
    }

    #[inline]
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        z - self.shift + self.cauchy_part(z)
    }

    /// Real boundary value; `None` exactly at a pole.
    #[inline]
    pub fn eval_real(&self, x: T) -> Option<T> {
        let mut acc = x - self.shift;
        for (&p, &m) in self.poles.iter().zip(&self.masses) {
            let d = p - x;
            if d == T::zero() {
                return None;
            }
            acc += m / d;
        }
        Some(acc)
    }

    /// `F'(x) = 1 + sum_k mass_k / (pole_k - x)^2`, which is at least 1.
    #[inline]
    pub fn derivative_real(&self, x: T) -> T {
        let mut acc = T::one();
        for (&p, &m) in self.poles.iter().zip(&self.masses) {
            let d = p - x;
            acc += m / (d * d);
        }
        acc
    }

    /// `nu` rescaled to a probability measure, or `None` when `nu = 0`.
    pub fn normalized_nu(&self) -> Option<AtomicMeasure<T>> {
        let total = self.total_mass();
        if self.poles.is_empty() || !(total > T::zero()) {
            return None;
        }
        Some(AtomicMeasure::from_sorted_parts(
            self.poles.clone(),
            self.masses.iter().map(|&m| m / total).collect(),
        ))
    }
}

/// Reads off the Nevanlinna data of an atomic measure.
///
/// Each pole is the unique zero of `G(x) = sum_j w_j / (x - t_j)` between two
/// consecutive atoms, where `G` falls from `+inf` to `-inf`; its mass is the
/// residue `-1 / G'(pole)`. A single atom gives the zero measure.
pub fn nevanlinna_extract<T: Scalar>(m: &AtomicMeasure<T>) -> NevanlinnaData<T> {
    let t = m.positions();
    let w = m.weights();
    let cauchy = |x: T| -> (T, T) {
        let mut g = T::zero();
        let mut dg = T::zero();
        for (&tj, &wj) in t.iter().zip(w) {
            let d = x - tj;
            g += wj / d;
            dg -= wj / (d * d);
        }
        (g, dg)
    };
    let mut poles = Vec::with_capacity(t.len().saturating_sub(1));
    let mut masses = Vec::with_capacity(t.len().saturating_sub(1));
    for pair in t.windows(2) {
        // -G is increasing between atoms
        let p = increasing_root(
            |x| {
                let (g, dg) = cauchy(x);
                (-g, -dg)
            },
            pair[0],
            pair[1],
            T::zero(),
        );
        let (_, dg) = cauchy(p);
        poles.push(p);
        masses.push(-T::one() / dg);
    }
    NevanlinnaData::new(m.mean(), poles, masses)
}

/// The constants entering the Berry-Esseen bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants<T> {
    /// `int |t| d nu`.
    pub c: T,
    /// `int |t| d rho`, where `rho` is the Nevanlinna measure of `nu` (as a
    /// probability measure).
    pub d: T,
    /// Mean of `nu` normalised to a probability measure.
    pub m_nu: T,
    /// Second moment of `nu` normalised to a probability measure.
    pub m2_nu: T,
}

/// `c`, `d`, `m(nu)` and `m_2(nu)` of an atomic measure; all zero for a point mass.
pub fn constants_c_d<T: Scalar>(m: &AtomicMeasure<T>) -> BoundConstants<T> {
    let nd = nevanlinna_extract(m);
    let c = nd.first_absolute_moment();
    match nd.normalized_nu() {
        None => BoundConstants {
            c,
            d: T::zero(),
            m_nu: T::zero(),
            m2_nu: T::zero(),
        },
        Some(nu) => {
            let rho = nevanlinna_extract(&nu);
            BoundConstants {
                c,
                d: rho.first_absolute_moment(),
                m_nu: nu.mean(),
                m2_nu: nu.moment(2),
            }
        }
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
    fn boole_nu_is_unit_mass_at_zero() {
        let nd = nevanlinna_extract(&AtomicMeasure::<f64>::boole());
        assert_eq!(nd.shift(), 0.0);
        assert_eq!(nd.poles().len(), 1);
        assert_abs_diff_eq!(nd.poles()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nd.masses()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn skewed_nu_is_unit_mass_at_inverse_sqrt_two() {
        let nd = nevanlinna_extract(&skewed());
        assert_abs_diff_eq!(nd.shift(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nd.poles()[0], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(nd.masses()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn point_mass_has_zero_nu() {
        let nd = nevanlinna_extract(&AtomicMeasure::point_mass(2.5f64));
        assert_eq!(nd.shift(), 2.5);
        assert!(nd.is_zero());
        assert_eq!(nd.total_mass(), 0.0);
    }

    #[test]
    fn nu_mass_is_the_variance() {
        let m = AtomicMeasure::new(&[(-2.0, 0.1), (-0.3, 0.4), (0.5, 0.3), (3.0, 0.2)]).unwrap();
        let nd = nevanlinna_extract(&m);
        assert_eq!(nd.poles().len(), 3);
        assert_abs_diff_eq!(nd.total_mass(), m.variance(), epsilon = 1e-12);
        for (i, &p) in nd.poles().iter().enumerate() {
            assert!(m.positions()[i] < p && p < m.positions()[i + 1]);
        }
    }

    #[test]
    fn constants_examples() {
        let b = constants_c_d(&AtomicMeasure::<f64>::boole());
        assert_abs_diff_eq!(b.c, 0.0, epsilon = 1e-15);
        assert_eq!((b.d, b.m_nu, b.m2_nu), (0.0, b.m_nu, b.m2_nu));
        assert_abs_diff_eq!(b.m_nu, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.m2_nu, 0.0, epsilon = 1e-15);

        let s = constants_c_d(&skewed());
        assert_abs_diff_eq!(s.c, 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(s.d, 0.0);
        assert_abs_diff_eq!(s.m_nu, 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.m2_nu, 0.5, epsilon = 1e-14);

        let d = constants_c_d(&AtomicMeasure::point_mass(-1.0f64));
        assert_eq!((d.c, d.d), (0.0, 0.0));
    }

    #[test]
    fn second_level_rho_from_a_three_atom_measure() {
        // mean 0, variance 1, three atoms: nu has two atoms, so rho is a point mass
        let a = 3f64.sqrt() / 2.0;
        let m = AtomicMeasure::new(&[
            (-2.0 * a, 1.0 / 6.0),
            (0.0, 2.0 / 3.0),
            (2.0 * a, 1.0 / 6.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(m.variance(), 1.0, epsilon = 1e-14);
        let k = constants_c_d(&m);
        let nd = nevanlinna_extract(&m);
        let nu = nd.normalized_nu().unwrap();
        let rho = nevanlinna_extract(&nu);
        assert_eq!(rho.poles().len(), 1);
        assert_abs_diff_eq!(rho.total_mass(), nu.variance(), epsilon = 1e-12);
        assert_abs_diff_eq!(k.d, rho.poles()[0].abs() * rho.masses()[0], epsilon = 1e-14);
    }
}
