//! Boundary maps on the real line and the orbits of `F` in the upper half-plane.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, MeasureSpec};
use crate::scalar::Scalar;
use crate::special::half_gaussian_cdf;
use crate::transforms::{branch_preimages, nevanlinna_extract, FTransform, NevanlinnaData};

/// `T x = lim F(x + iy)` as `y -> 0+`, the real rational map induced by an
/// atomic measure. Preserves Lebesgue measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMap<T> {
    nd: NevanlinnaData<T>,
    atoms: Vec<T>,
}

impl<T: Scalar> BoundaryMap<T> {
    pub fn new(m: &AtomicMeasure<T>) -> Self {
        BoundaryMap {
            nd: nevanlinna_extract(m),
            atoms: m.positions().to_vec(),
        }
    }

    pub fn nevanlinna(&self) -> &NevanlinnaData<T> {
        &self.nd
    }

    /// `T x`. Atoms map to exactly `0`; a pole is an error.
    pub fn apply(&self, x: T) -> Result<T> {
        self.step(x, 0)
    }

    #[inline]
    fn step(&self, x: T, index: usize) -> Result<T> {
        if self
            .atoms
            .binary_search_by(|a| a.partial_cmp(&x).expect("finite atoms"))
            .is_ok()
        {
            return Ok(T::zero());
        }
        match self.nd.eval_real(x) {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(Error::PoleHit {
                index,
                x: x.as_f64(),
            }),
        }
    }
}

pub fn boundary_map<T: Scalar>(m: &AtomicMeasure<T>, x: T) -> Result<T> {
    BoundaryMap::new(m).apply(x)
}

fn check_interval<T: Scalar>(a: T, b: T) -> Result<()> {
    if a.is_finite() && b.is_finite() && a <= b {
        Ok(())
    } else {
        Err(Error::InvalidInterval {
            a: a.as_f64(),
            b: b.as_f64(),
        })
    }
}

/// `#{0 <= k < n : T^k x0 in [a, b]}`.
pub fn occupation_time<T: Scalar>(map: &BoundaryMap<T>, x0: T, a: T, b: T, n: u64) -> Result<u64> {
    check_interval(a, b)?;
    let mut x = x0;
    let mut count = 0;
    for k in 0..n {
        if x >= a && x <= b {
            count += 1;
        }
        if k + 1 < n {
            x = map.step(x, k as usize + 1)?;
        }
    }
    Ok(count)
}

/// Lebesgue measure of `T^{-1}([a, b])`, summed over the branches.
pub fn preimage_length_check<T: Scalar>(m: &AtomicMeasure<T>, a: T, b: T) -> Result<T> {
    check_interval(a, b)?;
    if a == b {
        return Ok(T::zero());
    }
    let nd = nevanlinna_extract(m);
    let lo = branch_preimages(&nd, a)?;
    let hi = branch_preimages(&nd, b)?;
    Ok(lo.iter().zip(&hi).map(|(&x, &y)| (y - x).abs()).sum())
}

/// Smallest integer `k >= 1` with `nu([-k, k]) >= 0.9 nu(R)`.
pub fn choose_k<T: Scalar>(nd: &NevanlinnaData<T>) -> u32 {
    let need = T::lit(0.9) * nd.total_mass();
    let mut k = 1u32;
    while nd.mass_within(T::from_u32(k).expect("k representable")) < need {
        k += 1;
    }
    k
}

/// `z` lies in `{x + iy : |x| <= y, y >= 2k + 2}`.
pub fn cone_membership<T: Scalar>(z: Complex<T>, k: u32) -> bool {
    let floor = T::from_u32(2 * k + 2).expect("k representable");
    z.re.abs() <= z.im && z.im >= floor
}

/// Number of `samples` points, drawn uniformly from the part of the cone
/// with `y <= 10 (2k + 2)`, that `F` maps out of the cone.
pub fn cone_invariance_check<T: Scalar>(
    spec: &MeasureSpec<T>,
    k: u32,
    samples: usize,
    seed: u64,
) -> usize {
    let f = FTransform::new(spec);
    let lo = (2 * k + 2) as f64;
    let hi = 10.0 * lo;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut drawn = 0;
    while drawn < samples {
        let y = rng.gen_range(lo..=hi);
        let x = rng.gen_range(-hi..=hi);
        if x.abs() > y {
            continue;
        }
        drawn += 1;
        let z = Complex::new(T::lit(x), T::lit(y));
        if !cone_membership(f.eval(z), k) {
            violations += 1;
        }
    }
    violations
}

/// Partial sums `S(j) = sum_{i <= j} Im(-1 / F^i(z0))` along the orbit of
/// `z0 = (2k + 2) i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries<T> {
    pub z0: Complex<T>,
    pub variance: T,
    /// `partial[j - 1] = S(j)`.
    pub partial: Vec<T>,
    /// `F^n(z0)`.
    pub last: Complex<T>,
}

impl<T: Scalar> ReturnSeries<T> {
    pub fn len(&self) -> usize {
        self.partial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial.is_empty()
    }

    /// `S(j)` for `1 <= j <= n`.
    pub fn sum(&self, j: usize) -> T {
        self.partial[j - 1]
    }

    /// Asymptotic size of `S(j)`: `sqrt(2 j / variance)`.
    pub fn comparator(&self, j: usize) -> T {
        (T::lit(2.0) * T::of_usize(j) / self.variance).sqrt()
    }

    pub fn ratio(&self, j: usize) -> T {
        self.sum(j) / self.comparator(j)
    }

    /// `F^n(z0) / sqrt(n)`, which tends to `i sqrt(2 variance)`.
    pub fn scaled_last(&self) -> Complex<T> {
        self.last / T::of_usize(self.partial.len()).sqrt()
    }
}

pub fn return_sequence_partial<T: Scalar>(
    spec: &MeasureSpec<T>,
    k: u32,
    n: usize,
) -> Result<ReturnSeries<T>> {
    let (mean, variance) = (spec.mean(), spec.variance());
    if mean.abs() > T::lit(1e-9) || !(variance > T::zero()) || !variance.is_finite() {
        return Err(Error::NotStandardized {
            mean: mean.as_f64(),
            variance: variance.as_f64(),
        });
    }
    let f = FTransform::new(spec);
    let z0 = Complex::new(T::zero(), T::from_u32(2 * k + 2).expect("k representable"));
    let mut z = z0;
    let mut s = T::zero();
    let mut partial = Vec::with_capacity(n);
    for _ in 0..n {
        z = f.eval(z);
        s += -z.inv().im;
        partial.push(s);
    }
    Ok(ReturnSeries {
        z0,
        variance,
        partial,
        last: z,
    })
}

/// Monte Carlo sample of normalised occupation times.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationResult<T> {
    pub n: u64,
    /// `S_n` per orbit that completed, in orbit order.
    pub counts: Vec<u64>,
    /// Indices of orbits that hit a pole.
    pub dropped: Vec<usize>,
    /// `lambda(A) sqrt(2n) / pi`.
    pub normalization: T,
    /// Distinct normalised counts `t` and the empirical CDF at `t`.
    pub ecdf: Vec<(T, T)>,
    /// Kolmogorov-Smirnov distance to [`half_gaussian_cdf`].
    pub ks: T,
}

/// Occupation times of `[a, b]` by orbits started uniformly on `[a, b]`,
/// normalised by `lambda(A) sqrt(2n) / pi` and compared to the limit law
/// `erf(t / sqrt(pi))`.
///
/// Orbit `i` draws its start from stream `i` of a ChaCha8 generator keyed by
/// `seed`, so results do not depend on the thread count.
pub fn darling_kac_mc<T: Scalar>(
    m: &AtomicMeasure<T>,
    a: T,
    b: T,
    n: u64,
    orbits: usize,
    seed: u64,
) -> Result<OccupationResult<T>> {
    check_interval(a, b)?;
    if a == b {
        return Err(Error::InvalidInterval {
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    if n == 0 || orbits == 0 {
        return Err(Error::InvalidArgument(
            "need n >= 1 and at least one orbit".into(),
        ));
    }
    crate::clt::check_standardized(m.mean(), m.variance())?;
    let map = BoundaryMap::new(m);
    let (af, bf) = (a.as_f64(), b.as_f64());
    let runs: Vec<Option<u64>> = (0..orbits)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x0 = T::lit(rng.gen_range(af..bf));
            occupation_time(&map, x0, a, b, n).ok()
        })
        .collect();
    let mut counts = Vec::with_capacity(orbits);
    let mut dropped = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Some(c) => counts.push(c),
            None => dropped.push(i),
        }
    }
    let normalization =
        (b - a) * (T::lit(2.0) * T::from_u64(n).expect("n representable")).sqrt() / T::PI();
    let (ecdf, ks) = empirical_ks(&counts, normalization)?;
    Ok(OccupationResult {
        n,
        counts,
        dropped,
        normalization,
        ecdf,
        ks,
    })
}

fn empirical_ks<T: Scalar>(counts: &[u64], normalization: T) -> Result<(Vec<(T, T)>, T)> {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let total = T::of_usize(sorted.len());
    let mut ecdf = Vec::new();
    let mut ks = if sorted.is_empty() {
        T::one()
    } else {
        T::zero()
    };
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = T::from_u64(sorted[i]).expect("count representable") / normalization;
        let limit = half_gaussian_cdf(t)?;
        let below = T::of_usize(i) / total;
        let at = T::of_usize(j) / total;
        ks = ks.max((limit - below).abs()).max((limit - at).abs());
        ecdf.push((t, at));
        i = j;
    }
    Ok((ecdf, ks))
}
