use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use bexcorr_core::*;
use proptest::prelude::*;

fn simpson_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0);
    (0..=n)
        .map(|i| match i {
            0 => 1.0,
            i if i == n => 1.0,
            i if i % 2 == 1 => 4.0,
            _ => 2.0,
        })
        .collect()
}

/// ∫∫ f over [0, hi]² by the tensor composite Simpson rule.
fn simpson_2d(hi: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = hi / n as f64;
    let wts = simpson_weights(n);
    let mut total = 0.0;
    for (i, wi) in wts.iter().enumerate() {
        let mut row = 0.0;
        for (j, wj) in wts.iter().enumerate() {
            row += wj * f(i as f64 * h, j as f64 * h);
        }
        total += wi * row;
    }
    total * h * h / 9.0
}

#[test]
fn exponential_pearson_equals_r() {
    for i in 0..50 {
        let r = i as f64 / 49.0;
        for (sx2, sy2) in [(1.0, 1.0), (0.3, 7.0)] {
            let p = ModelParams::new(r, sx2, sy2).unwrap();
            let rp = pop_moments_exp(&p).pearson();
            assert!((rp - r).abs() <= 1e-12, "r={r}: {rp}");
        }
    }
}

#[test]
fn exponential_moments() {
    let p = ModelParams::unit(0.0).unwrap();
    let m = pop_moments_exp(&p);
    assert_eq!((m.m10, m.m20), (2.0, 8.0));
    assert_eq!(m.m11, m.m10 * m.m01);
    let one = pop_moments_exp(&ModelParams::unit(1.0).unwrap());
    assert_eq!(one.m11, 8.0);
}

#[test]
fn rayleigh_moments() {
    let m = pop_moments_rayleigh(&ModelParams::unit(0.3).unwrap());
    assert!((m.m10 - FRAC_PI_2.sqrt()).abs() <= 1e-15);
    assert!((m.m20 - 2.0).abs() <= 1e-15);
    let zero = pop_moments_rayleigh(&ModelParams::unit(0.0).unwrap());
    assert!((zero.m11 - FRAC_PI_2).abs() <= 1e-14);
    assert!((zero.m11 - zero.m10 * zero.m01).abs() <= 1e-14);
    let one = pop_moments_rayleigh(&ModelParams::unit(1.0).unwrap());
    assert!((one.m11 - 2.0).abs() <= 1e-14);
}

#[test]
fn rayleigh_pearson_fixed_points() {
    assert!(pearson_rayleigh_pop(0.0).unwrap().abs() <= 1e-12);
    assert!((pearson_rayleigh_pop(1.0).unwrap() - 1.0).abs() <= 1e-12);
    assert!((pearson_rayleigh_pop(0.5).unwrap() - 0.474_026_923_233_119_45).abs() <= 1e-13);
    let mut prev = 0.0;
    for i in 1..100 {
        let r = i as f64 / 100.0;
        let rp = pearson_rayleigh_pop(r).unwrap();
        assert!(rp > prev);
        assert!(rp < r && r - rp > 1e-4, "r={r}: {rp}");
        prev = rp;
    }
    assert!(pearson_rayleigh_pop(1.01).is_err());
}

#[test]
fn cos2_limit_range_and_identity() {
    assert!((cos2_limit(0.0).unwrap() - PI * PI / 16.0).abs() <= 1e-12);
    assert!((cos2_limit(1.0).unwrap() - 1.0).abs() <= 1e-12);
    let m = pop_moments_rayleigh(&ModelParams::new(0.5, 2.0, 0.5).unwrap());
    let identity = m.m11 * m.m11 / (m.m20 * m.m02);
    assert!((cos2_limit(0.5).unwrap() - identity).abs() <= 1e-12);
    assert!((cos2_limit(0.5).unwrap() - 0.786_991_141_273_393_3).abs() <= 1e-13);
    let mut prev = cos2_limit(0.0).unwrap();
    for i in 1..=100 {
        let c = cos2_limit(i as f64 / 100.0).unwrap();
        assert!(c > prev && c <= 1.0 + 1e-15);
        prev = c;
    }
}

#[test]
fn covariance_structure() {
    let zero = build_covariance(&ModelParams::new(0.0, 2.0, 3.0).unwrap(), 0.7);
    let m = zero.matrix();
    for i in 0..2 {
        for j in 2..4 {
            assert_eq!(m[i][j], 0.0);
            assert_eq!(m[j][i], 0.0);
        }
    }
    assert_eq!([m[0][0], m[1][1], m[2][2], m[3][3]], [2.0, 2.0, 3.0, 3.0]);

    let one = build_covariance(&ModelParams::unit(1.0).unwrap(), 0.0);
    assert_eq!((one.rho_c(), one.rho_s()), (1.0, 0.0));
    let m = one.matrix();
    assert_eq!([m[0][2], m[1][3], m[0][3], m[1][2]], [1.0, 1.0, 0.0, 0.0]);

    let half = build_covariance(&ModelParams::unit(0.5).unwrap(), FRAC_PI_4);
    assert!((half.rho_c() - 0.5).abs() <= 1e-15 && (half.rho_s() - 0.5).abs() <= 1e-15);
    assert!(half.eigenvalues().iter().all(|&e| e >= -1e-12));
    half.cholesky().unwrap();
}

#[test]
fn params_validation() {
    assert!(ModelParams::new(1.5, 1.0, 1.0).is_err());
    assert!(ModelParams::new(-0.1, 1.0, 1.0).is_err());
    assert!(ModelParams::new(0.5, 0.0, 1.0).is_err());
    assert!(ModelParams::new(0.5, 1.0, f64::NAN).is_err());
    let one = ModelParams::unit(1.0).unwrap();
    assert_eq!(logpdf_exp(&one, 1.0, 1.0), Err(Error::DegenerateDistribution));
    assert!(logpdf_exp(&ModelParams::unit(0.5).unwrap(), -1.0, 1.0).is_err());
}

#[test]
fn logpdf_frozen_value() {
    let p = ModelParams::unit(0.5).unwrap();
    assert!((logpdf_exp(&p, 2.0, 2.0).unwrap() - (-3.245_675_202_435_383)).abs() <= 1e-13);
}

#[test]
fn pdfs_integrate_to_one() {
    for r in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let p = ModelParams::new(r, 1.0, 1.5).unwrap();
        // u = s², w = q²: the Jacobian 4sq removes the square-root kinks at 0
        let exp_mass = simpson_2d(9.0, 900, |s, q| {
            if s == 0.0 || q == 0.0 {
                0.0
            } else {
                4.0 * s * q * logpdf_exp(&p, s * s, q * q).unwrap().exp()
            }
        });
        let ray_mass = simpson_2d(9.0, 900, |v, z| {
            if v == 0.0 || z == 0.0 {
                0.0
            } else {
                logpdf_rayleigh(&p, v, z).unwrap().exp()
            }
        });
        assert!((exp_mass - 1.0).abs() <= 1e-6, "exp r={r}: {exp_mass}");
        assert!((ray_mass - 1.0).abs() <= 1e-6, "rayleigh r={r}: {ray_mass}");
    }
}

proptest! {
    #[test]
    fn independence_at_zero(sx2 in 0.1f64..10.0, sy2 in 0.1f64..10.0, u in 0.0f64..50.0, w in 0.0f64..50.0) {
        let p = ModelParams::new(0.0, sx2, sy2).unwrap();
        let marginals = -(2.0 * sx2).ln() - u / (2.0 * sx2) - (2.0 * sy2).ln() - w / (2.0 * sy2);
        prop_assert!((logpdf_exp(&p, u, w).unwrap() - marginals).abs() <= 1e-12 * (1.0 + marginals.abs()));
    }

    #[test]
    fn rayleigh_is_change_of_variables(r in 0.0f64..0.99, v in 0.01f64..6.0, z in 0.01f64..6.0) {
        let p = ModelParams::new(r, 1.3, 0.8).unwrap();
        let lhs = logpdf_rayleigh(&p, v, z).unwrap();
        let rhs = logpdf_exp(&p, v * v, z * z).unwrap() + (4.0 * v * z).ln();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn moments_satisfy_cauchy_schwarz(r in 0.0f64..=1.0, sx2 in 0.01f64..100.0, sy2 in 0.01f64..100.0) {
        let p = ModelParams::new(r, sx2, sy2).unwrap();
        for m in [pop_moments_exp(&p), pop_moments_rayleigh(&p)] {
            prop_assert!(m.m20 >= m.m10 * m.m10 && m.m02 >= m.m01 * m.m01);
            prop_assert!([m.m10, m.m01, m.m20, m.m02, m.m11].iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn covariance_split_preserves_r(r in 0.0f64..=1.0, angle in -10.0f64..10.0) {
        let c = build_covariance(&ModelParams::new(r, 2.0, 0.5).unwrap(), angle);
        prop_assert!((c.rho_c().powi(2) + c.rho_s().powi(2) - r).abs() <= 1e-14);
        prop_assert!(c.eigenvalues().iter().all(|&e| e >= -1e-12));
    }
}
