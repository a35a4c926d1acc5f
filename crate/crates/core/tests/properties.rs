use num_complex::Complex;
use proptest::prelude::*;

use monoclt::clt::{berry_esseen_bound, BoundPart};
use monoclt::inversion::{bai_rhs_arcsine, kolmogorov_exact, kolmogorov_grid, CdfCurve, TailInfo};
use monoclt::transforms::{
    branch_preimage, eval_g, monotone_power_exact, nevanlinna_extract, normalized_power_f,
    FTransform,
};
use monoclt::{AtomicMeasure, MeasureSpec};

/// 1 to 4 atoms with distinct positions in roughly [-3, 3].
fn measure() -> impl Strategy<Value = AtomicMeasure<f64>> {
    prop::collection::vec((0.05f64..1.5, 0.05f64..1.0), 1..=4).prop_map(|raw| {
        let mut x = -3.0;
        let total: f64 = raw.iter().map(|r| r.1).sum();
        let pairs: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(gap, w)| {
                x += gap;
                (x, w / total)
            })
            .collect();
        AtomicMeasure::new(&pairs).unwrap()
    })
}

fn standardized() -> impl Strategy<Value = AtomicMeasure<f64>> {
    measure()
        .prop_filter("needs two atoms", |m| m.len() >= 2)
        .prop_map(|m| {
            let (mean, sd) = (m.mean(), m.variance().sqrt());
            let pairs: Vec<(f64, f64)> = m.atoms().map(|(t, w)| ((t - mean) / sd, w)).collect();
            AtomicMeasure::new(&pairs).unwrap()
        })
}

fn upper() -> impl Strategy<Value = Complex<f64>> {
    (-6.0f64..6.0, -2.0f64..1.0).prop_map(|(x, ly)| Complex::new(x, 10f64.powf(ly)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_increases_imaginary_part(m in measure(), z in upper()) {
        let f = FTransform::new(&MeasureSpec::Atomic(m));
        prop_assert!(f.eval(z).im >= z.im * (1.0 - 1e-12));
    }

    #[test]
    fn nevanlinna_form_reproduces_f(m in measure(), z in upper()) {
        let direct = eval_g(&MeasureSpec::Atomic(m.clone()), z).unwrap().inv();
        let nd = nevanlinna_extract(&m);
        prop_assert!((nd.eval(z) - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
        prop_assert!((nd.total_mass() - m.variance()).abs() <= 1e-9);
    }

    #[test]
    fn power_is_composition(m in measure(), n in 1u32..=5, z in upper()) {
        let p = monotone_power_exact(&m, n, 1 << 20).unwrap();
        let g: Complex<f64> = p.atoms().map(|(t, w)| w / (z - t)).sum();
        let f = FTransform::new(&MeasureSpec::Atomic(m));
        prop_assert!((g - f.iterate(n as u64, z).inv()).norm() <= 1e-8 * g.norm());
    }

    #[test]
    fn power_conserves_moments(m in measure(), n in 1u32..=6) {
        let p = monotone_power_exact(&m, n, 1 << 20).unwrap();
        let nf = n as f64;
        prop_assert!(p.positions().windows(2).all(|w| w[0] < w[1]));
        prop_assert!((p.total_mass() - 1.0).abs() <= 1e-10);
        prop_assert!((p.mean() - nf * m.mean()).abs() <= 1e-8 * (1.0 + nf));
        prop_assert!((p.variance() - nf * m.variance()).abs() <= 1e-7 * (1.0 + nf));
    }

    #[test]
    fn branch_preimages_solve(m in measure(), target in -50.0f64..50.0) {
        let nd = nevanlinna_extract(&m);
        for b in 0..=nd.poles().len() {
            let x = branch_preimage(&nd, b, target).unwrap();
            let v = nd.eval_real(x).unwrap();
            prop_assert!((v - target).abs() <= 1e-9 * (1.0 + target.abs()));
        }
    }

    #[test]
    fn normalized_power_matches_dilation(m in measure(), n in 1u64..=4, z in upper()) {
        let spec = MeasureSpec::Atomic(m.clone());
        let p = monotone_power_exact(&m, n as u32, 1 << 20).unwrap().dilate((n as f64).sqrt()).unwrap();
        let g: Complex<f64> = p.atoms().map(|(t, w)| w / (z - t)).sum();
        let w = normalized_power_f(&spec, n, z).unwrap();
        prop_assert!((w.inv() - g).norm() <= 1e-8 * g.norm());
    }

    #[test]
    fn kolmogorov_grid_is_a_pseudometric(
        a in prop::collection::vec(0.0f64..1.0, 20),
        b in prop::collection::vec(0.0f64..1.0, 20),
        c in prop::collection::vec(0.0f64..1.0, 20),
    ) {
        let grid: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let curve = |v: &Vec<f64>| CdfCurve { x: grid.clone(), cdf: v.clone(), y: 0.0 };
        let (ca, cb, cc) = (curve(&a), curve(&b), curve(&c));
        let d = |p: &CdfCurve<f64>, q: &CdfCurve<f64>| kolmogorov_grid(p, q).unwrap().distance;
        prop_assert_eq!(d(&ca, &ca), 0.0);
        prop_assert_eq!(d(&ca, &cb), d(&cb, &ca));
        prop_assert!(d(&ca, &cc) <= d(&ca, &cb) + d(&cb, &cc));
    }

    #[test]
    fn kolmogorov_distance_below_bai_bound(m in standardized(), n in 1u32..=3, ly in -2.0f64..-1.2) {
        let y = 10f64.powf(ly);
        let spec = MeasureSpec::Atomic(m.clone());
        let f = FTransform::new(&spec);
        let p = monotone_power_exact(&m, n, 1 << 20).unwrap().dilate((n as f64).sqrt()).unwrap();
        let rhs = bai_rhs_arcsine(|z| f.normalized_power(n as u64, z), TailInfo::of(&p), y).unwrap();
        prop_assert!(kolmogorov_exact(&p) <= rhs.total);
    }

    #[test]
    fn bound_thresholds_are_consistent(m in standardized(), n in 1u64..100_000) {
        for part in [BoundPart::One, BoundPart::Two, BoundPart::Three] {
            if let Ok(r) = berry_esseen_bound(&m, n, part) {
                prop_assert!(r.bound_value > 0.0);
                prop_assert_eq!(r.applicable, n as f64 > r.threshold_n);
            }
        }
    }
}

#[test]
fn single_precision_power() {
    let p = monotone_power_exact(&AtomicMeasure::<f32>::boole(), 6, 1 << 20).unwrap();
    assert_eq!(p.len(), 64);
    assert!((p.total_mass() - 1.0).abs() < 1e-5);
    assert!((p.variance() - 6.0).abs() < 1e-4);
    let q = monotone_power_exact(&AtomicMeasure::<f64>::boole(), 6, 1 << 20).unwrap();
    let d32 = kolmogorov_exact(&p.dilate(6f32.sqrt()).unwrap()) as f64;
    let d64 = kolmogorov_exact(&q.dilate(6f64.sqrt()).unwrap());
    assert!((d32 - d64).abs() < 1e-5);
}
