use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::scalar::Scalar;

use super::branch::branch_preimage;
use super::nevanlinna::{nevanlinna_extract, NevanlinnaData};

pub const DEFAULT_ATOM_BUDGET: usize = 1 << 20;

/// Number of atoms of the `n`-th monotone power of an `atoms`-atom measure, as `f64`.
pub fn power_atom_count(atoms: usize, n: u32) -> f64 {
    (atoms as f64).powi(n as i32)
}

/// The monotone convolution power `m^n`, computed exactly.
///
/// Starting from `delta_0`, each step replaces the measure by its pull-back
/// under `F`: every atom `a` with mass `w` spawns one atom per branch at the
/// solution `x` of `F(x) = a`, carrying mass `w / F'(x)`. Branch intervals are
/// ordered, so the atoms come out sorted without a sort. Atoms that land on
/// the same floating point number are merged, so very clustered seeds can
/// give fewer than `|m|^n` atoms.
pub fn monotone_power_exact<T: Scalar>(
    m: &AtomicMeasure<T>,
    n: u32,
    budget: usize,
) -> Result<AtomicMeasure<T>> {
    let required = power_atom_count(m.len(), n);
    if required > budget as f64 {
        return Err(Error::AtomBudgetExceeded { required, budget });
    }
    let nd = nevanlinna_extract(m);
    let mut level = AtomicMeasure::point_mass(T::zero());
    for _ in 0..n {
        level = pull_back(&nd, &level)?;
    }
    Ok(level)
}

/// The `k` leftmost and `k` rightmost atoms of `m^n`, exact.
///
/// Pull-back is increasing on each branch and the branches are ordered, so
/// the extreme `k` atoms of one level only depend on the extreme `k` atoms of
/// the previous one. Cost is `O(n k)` instead of `O(|m|^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTails<T> {
    /// Leftmost atoms; the CDF is `0` before the first one.
    pub left: AtomicMeasure<T>,
    /// Rightmost atoms; the CDF is `1` after the last one.
    pub right: AtomicMeasure<T>,
    /// Whether `left` already holds every atom of `m^n`.
    pub complete: bool,
}

pub fn monotone_power_tails<T: Scalar>(
    m: &AtomicMeasure<T>,
    n: u32,
    k: usize,
) -> Result<PowerTails<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("tail size must be positive".into()));
    }
    let nd = nevanlinna_extract(m);
    let mut left = AtomicMeasure::point_mass(T::zero());
    let mut right = left.clone();
    let mut complete = true;
    for _ in 0..n {
        if complete {
            left = pull_back(&nd, &left)?;
            if left.len() <= k {
                right = left.clone();
                continue;
            }
            complete = false;
            right = left.slice(left.len() - k..left.len());
            left = left.slice(0..k);
            continue;
        }
        let l = pull_back(&nd, &left)?;
        let r = pull_back(&nd, &right)?;
        left = l.slice(0..k.min(l.len()));
        right = r.slice(r.len().saturating_sub(k)..r.len());
    }
    Ok(PowerTails {
        left,
        right,
        complete,
    })
}

/// One step of the recursion: the measure whose image under `F` is `prev`.
pub fn pull_back<T: Scalar>(
    nd: &NevanlinnaData<T>,
    prev: &AtomicMeasure<T>,
) -> Result<AtomicMeasure<T>> {
    let branches = nd.poles().len() + 1;
    let len = prev.len();
    let targets = prev.positions();
    let masses = prev.weights();
    let atoms: Vec<(T, T)> = (0..branches * len)
        .into_par_iter()
        .map(|idx| {
            let (b, j) = (idx / len, idx % len);
            let x = branch_preimage(nd, b, targets[j])?;
            Ok((x, masses[j] / nd.derivative_real(x)))
        })
        .collect::<Result<_>>()?;
    // Atoms that collide at working precision are merged.
    let mut positions: Vec<T> = Vec::with_capacity(atoms.len());
    let mut weights: Vec<T> = Vec::with_capacity(atoms.len());
    for (x, w) in atoms {
        match positions.last() {
            Some(&last) if x <= last => *weights.last_mut().expect("parallel vectors") += w,
            _ => {
                positions.push(x);
                weights.push(w);
            }
        }
    }
    Ok(AtomicMeasure::from_sorted_parts(positions, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn point_mass_powers_stay_at_zero() {
        let p = monotone_power_exact(&AtomicMeasure::point_mass(0.0f64), 5, DEFAULT_ATOM_BUDGET)
            .unwrap();
        assert_eq!(p.positions(), &[0.0]);
        assert_eq!(p.weights(), &[1.0]);
    }

    #[test]
    fn point_mass_powers_translate() {
        let p = monotone_power_exact(&AtomicMeasure::point_mass(0.5f64), 4, DEFAULT_ATOM_BUDGET)
            .unwrap();
        assert_abs_diff_eq!(p.positions()[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn first_power_is_the_measure() {
        let m = AtomicMeasure::new(&[(-2.0, 0.1), (-0.3, 0.4), (0.5, 0.3), (3.0, 0.2)]).unwrap();
        let p = monotone_power_exact(&m, 1, DEFAULT_ATOM_BUDGET).unwrap();
        for ((a, b), (c, d)) in p.atoms().zip(m.atoms()) {
            assert_abs_diff_eq!(a, c, epsilon = 1e-13);
            assert_abs_diff_eq!(b, d, epsilon = 1e-13);
        }
    }

    #[test]
    fn boole_square() {
        let p =
            monotone_power_exact(&AtomicMeasure::<f64>::boole(), 2, DEFAULT_ATOM_BUDGET).unwrap();
        let s5 = 5f64.sqrt();
        let big = (5.0 + s5) / 20.0;
        let small = (5.0 - s5) / 20.0;
        let want = [
            (-(1.0 + s5) / 2.0, big),
            (-(s5 - 1.0) / 2.0, small),
            ((s5 - 1.0) / 2.0, small),
            ((1.0 + s5) / 2.0, big),
        ];
        assert_eq!(p.len(), 4);
        for ((x, w), (ex, ew)) in p.atoms().zip(want) {
            assert_abs_diff_eq!(x, ex, epsilon = 1e-15);
            assert_abs_diff_eq!(w, ew, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.total_mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.moment(2), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn budget_is_enforced() {
        let err = monotone_power_exact(&AtomicMeasure::<f64>::boole(), 21, DEFAULT_ATOM_BUDGET)
            .unwrap_err();
        assert_eq!(
            err,
            Error::AtomBudgetExceeded {
                required: 2097152.0,
                budget: DEFAULT_ATOM_BUDGET
            }
        );
        assert!(monotone_power_exact(&AtomicMeasure::<f64>::boole(), 3, 7).is_err());
        assert!(monotone_power_exact(&AtomicMeasure::<f64>::boole(), 3, 8).is_ok());
    }

    #[test]
    fn tails_match_the_full_power() {
        let m = AtomicMeasure::new(&[(-1.0, 0.3), (0.2, 0.5), (2.0, 0.2)]).unwrap();
        let full = monotone_power_exact(&m, 7, DEFAULT_ATOM_BUDGET).unwrap();
        let t = monotone_power_tails(&m, 7, 50).unwrap();
        assert!(!t.complete);
        let len = full.len();
        for (i, (x, w)) in t.left.atoms().enumerate() {
            assert_abs_diff_eq!(x, full.positions()[i], epsilon = 1e-13);
            assert_abs_diff_eq!(w, full.weights()[i], epsilon = 1e-15);
        }
        for (i, (x, w)) in t.right.atoms().enumerate() {
            assert_abs_diff_eq!(x, full.positions()[len - 50 + i], epsilon = 1e-13);
            assert_abs_diff_eq!(w, full.weights()[len - 50 + i], epsilon = 1e-15);
        }
        let small = monotone_power_tails(&m, 3, 50).unwrap();
        assert!(small.complete);
        assert_eq!(small.left.len(), 27);
    }

    #[test]
    fn colliding_atoms_merge() {
        let m = AtomicMeasure::new(&[(-2.95, 0.5), (-2.9, 0.5)]).unwrap();
        let p = monotone_power_exact(&m, 12, DEFAULT_ATOM_BUDGET).unwrap();
        assert!(p.len() < 4096);
        assert!(p.positions().windows(2).all(|w| w[0] < w[1]));
        assert_abs_diff_eq!(p.total_mass(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn conservation_for_three_atoms() {
        let m = AtomicMeasure::new(&[(-1.0, 0.3), (0.2, 0.5), (2.0, 0.2)]).unwrap();
        let var = m.variance();
        let mean = m.mean();
        for n in 1..=8 {
            let p = monotone_power_exact(&m, n, DEFAULT_ATOM_BUDGET).unwrap();
            assert_eq!(p.len(), 3usize.pow(n));
            assert!(p.positions().windows(2).all(|w| w[0] < w[1]));
            assert_abs_diff_eq!(p.total_mass(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(p.mean(), n as f64 * mean, epsilon = 1e-10);
            assert_abs_diff_eq!(p.variance(), n as f64 * var, epsilon = 1e-8 * n as f64);
        }
    }
}
