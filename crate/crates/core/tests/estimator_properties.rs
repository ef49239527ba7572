use bexcorr_core::estimators::{ETA_OFFSET, Estimate};
use bexcorr_core::*;
use proptest::prelude::*;

const DELTA_XI: f64 = 0.003_265_661_860_562_699;
const DELTA_ETA: f64 = 0.001_670_575_999_013_497;

fn sample(r: f64, n: usize, seed: u64) -> PairedSample {
    let p = ModelParams::new(r, 1.3, 0.6).unwrap();
    sample_pairs(&p, n, SeedSpec::new(seed, 0)).unwrap()
}

fn scaled(s: &PairedSample, alpha: f64, beta: f64) -> PairedSample {
    PairedSample::from_exponential(
        s.u().iter().map(|u| alpha * u).collect(),
        s.w().iter().map(|w| beta * w).collect(),
    )
    .unwrap()
}

fn grid_r() -> impl Strategy<Value = f64> {
    (0usize..50).prop_map(|k| k as f64 * 0.02)
}

#[test]
fn transform_anchors() {
    assert_eq!(xi_transform(0.0), 0.0);
    assert_eq!(xi_transform(1.0), 1.0);
    assert!(eta_transform(ETA_OFFSET).abs() <= 1e-15);
    assert!((eta_transform(1.0) - 1.0).abs() <= 1e-15);
    assert!((eta_transform(0.8) - 0.533_778_780_284_863_3).abs() <= 1e-15);
}

#[test]
fn asymptotic_recovery_within_scanned_deltas() {
    let mut worst_xi: f64 = 0.0;
    let mut worst_eta: f64 = 0.0;
    for i in 1..=99 {
        let r = i as f64 / 100.0;
        worst_xi = worst_xi.max((xi_transform(pearson_rayleigh_pop(r).unwrap()) - r).abs());
        worst_eta = worst_eta.max((eta_transform(cos2_limit(r).unwrap()) - r).abs());
    }
    assert!((worst_xi - DELTA_XI).abs() <= 1e-12, "{worst_xi}");
    assert!((worst_eta - DELTA_ETA).abs() <= 1e-12, "{worst_eta}");
}

#[test]
fn identical_columns_give_one() {
    let v = vec![0.3, 1.2, 2.5, 0.9, 1.7];
    let s = PairedSample::from_rayleigh(v.clone(), v).unwrap();
    for est in Estimator::ALL {
        let e = est.estimate(&s).unwrap();
        assert!((e.value - 1.0).abs() <= 1e-15, "{est}: {e:?}");
        assert!(!e.censored);
    }
}

#[test]
fn small_cosine_is_censored() {
    let s = PairedSample::from_rayleigh(vec![1.0, 0.001, 0.5], vec![0.001, 1.0, 0.002]).unwrap();
    let e = estimate_r3(&s).unwrap();
    assert!(e.raw < 0.0 && e.censored && e.value == 0.0);
}

#[test]
fn constant_column_is_degenerate() {
    let s = PairedSample::from_rayleigh(vec![1.0; 4], vec![0.5, 1.0, 1.5, 2.0]).unwrap();
    assert!(matches!(estimate_r1(&s), Err(Error::DegenerateSample(_))));
    assert!(matches!(estimate_r2(&s), Err(Error::DegenerateSample(_))));
}

#[test]
fn censor_rules() {
    assert!(Estimate::censor(f64::NAN).is_err());
    assert!(Estimate::censor(1.1).is_err());
    assert_eq!(Estimate::censor(1.0 + 1e-13).unwrap().value, 1.0);
    let neg = Estimate::censor(-0.2).unwrap();
    assert_eq!((neg.value, neg.raw, neg.censored), (0.0, -0.2, true));
    assert_eq!(Estimate::censor(0.0).unwrap().value, 0.0);
}

#[test]
fn names_round_trip() {
    for est in Estimator::ALL {
        assert_eq!(est.name().parse::<Estimator>().unwrap(), est);
        assert_eq!(est.to_string(), est.name());
    }
    assert!("r4".parse::<Estimator>().is_err());
}

#[test]
fn large_sample_consistency() {
    for (k, r) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let s = sample(r, 1_000_000, 900 + k as u64);
        assert!((estimate_r1(&s).unwrap().value - r).abs() <= 0.01);
        assert!((estimate_r2(&s).unwrap().value - r).abs() <= DELTA_XI + 0.01);
        assert!((estimate_r3(&s).unwrap().value - r).abs() <= DELTA_ETA + 0.01);
    }
}

proptest! {
    #[test]
    fn scale_invariance(
        r in grid_r(),
        n in prop::sample::select(vec![3usize, 10, 50]),
        seed in any::<u64>(),
        la in -3.0f64..3.0,
        lb in -3.0f64..3.0,
    ) {
        let s = sample(r, n, seed);
        let t = scaled(&s, 10f64.powf(la), 10f64.powf(lb));
        for est in Estimator::ALL {
            let (a, b) = (est.estimate(&s), est.estimate(&t));
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert!((a.value - b.value).abs() <= 1e-12, "{est}: {a:?} {b:?}"),
                (a, b) => prop_assert!(a.is_err() && b.is_err()),
            }
        }
    }

    #[test]
    fn values_in_unit_interval_and_censoring_consistent(
        r in grid_r(),
        n in prop::sample::select(vec![3usize, 10, 50]),
        seed in any::<u64>(),
    ) {
        let s = sample(r, n, seed);
        for est in Estimator::ALL {
            let e = est.estimate(&s).unwrap();
            prop_assert!((0.0..=1.0).contains(&e.value));
            prop_assert_eq!(e.value == 0.0, e.raw <= 0.0);
            prop_assert_eq!(e.censored, e.raw < 0.0);
        }
    }

    #[test]
    fn permutation_stability(r in grid_r(), n in 3usize..200, seed in any::<u64>(), shuffle in any::<u64>()) {
        let s = sample(r, n, seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut state = shuffle | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let t = PairedSample::from_rayleigh(
            order.iter().map(|&i| s.v()[i]).collect(),
            order.iter().map(|&i| s.z()[i]).collect(),
        ).unwrap();
        for est in Estimator::ALL {
            let (a, b) = (est.estimate(&s).unwrap(), est.estimate(&t).unwrap());
            prop_assert!((a.value - b.value).abs() <= 1e-13, "{est}: {} {}", a.value, b.value);
        }
    }
}

#[test]
fn range_over_ten_thousand_samples() {
    let mut count = 0;
    for (k, r) in (0..50).map(|k| k as f64 * 0.02).enumerate() {
        for n in [3, 10, 50] {
            for rep in 0..67 {
                let p = ModelParams::unit(r).unwrap();
                let s = sample_pairs(&p, n, SeedSpec::new(5000 + k as u64, rep * 100 + n as u64)).unwrap();
                for est in Estimator::ALL {
                    let e = est.estimate(&s).unwrap();
                    assert!((0.0..=1.0).contains(&e.value));
                    assert_eq!(e.value == 0.0, e.raw <= 0.0);
                }
                count += 1;
            }
        }
    }
    assert!(count >= 10_000);
}
