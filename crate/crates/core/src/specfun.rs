//! Special-function kernels: complete elliptic integrals, the order-zero
//! modified Bessel function (in log form), the Bessel ratio `I1/I0`, and the
//! standard normal pdf/cdf.
//!
//! **Convention.** `ellip_k` and `ellip_e` take the *modulus* `k`, i.e.
//!
//! ```text
//! K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)
//! E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ
//! ```
//!
//! Many libraries take the parameter `m = k²` instead. The Rayleigh cross
//! moment is written with `K(ρ)`, `E(ρ)` where `ρ = √r`, so callers pass
//! `√r` here, never `r`.

use crate::math::{exp, ln, sqrt, FRAC_1_SQRT_2, PI};
use crate::{Error, Result};

/// Elliptic-integral modulus, `0 <= k <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(Error::Domain {
                what: "elliptic modulus",
                value: k,
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Modulus::new(k)
    }
}

/// Runs the AGM from `(1, k')` and returns `(K, E)`.
///
/// `E = K · (1 − Σ_{n≥0} 2^{n−1} c_n²)` with `c_0 = k`, `c_{n+1} = (a_n − b_n)/2`.
fn agm_pair(k: f64) -> (f64, f64) {
    // (1 - k)(1 + k) keeps k' accurate as k -> 1.
    let mut a = 1.0;
    let mut b = sqrt((1.0 - k) * (1.0 + k));
    let mut weight = 0.5;
    let mut tail = weight * k * k;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        b = sqrt(a * b);
        a = a_next;
        weight *= 2.0;
        tail += weight * c * c;
        if c.abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
    }
    let big_k = PI / (2.0 * a);
    (big_k, big_k * (1.0 - tail))
}

/// Complete elliptic integral of the first kind, modulus convention.
///
/// Returns [`Error::Infinite`] at `k = 1`.
pub fn ellip_k(k: Modulus) -> Result<f64> {
    let k = k.value();
    if k == 0.0 {
        return Ok(PI / 2.0);
    }
    if k == 1.0 {
        return Err(Error::Infinite {
            what: "complete elliptic integral K",
        });
    }
    Ok(agm_pair(k).0)
}

/// Complete elliptic integral of the second kind, modulus convention.
pub fn ellip_e(k: Modulus) -> f64 {
    let k = k.value();
    if k == 0.0 {
        return PI / 2.0;
    }
    if k == 1.0 {
        return 1.0;
    }
    agm_pair(k).1
}

/// Below this argument `I0` and `I1` are summed from their power series;
/// above it the scaled asymptotic expansion is used.
pub const BESSEL_SERIES_LIMIT: f64 = 12.0;

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    while term > f64::EPSILON * 0.25 * sum {
        term *= q / (m * m);
        sum += term;
        m += 1.0;
    }
    sum
}

fn i1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut m = 1.0;
    while term > f64::EPSILON * 0.25 * sum {
        term *= q / (m * (m + 1.0));
        sum += term;
        m += 1.0;
    }
    sum
}

/// `√(2πx) e^{−x} I_ν(x)` from the large-argument expansion
/// `Σ_k (−1)^k a_k(ν) / x^k`, truncated at its smallest term.
fn scaled_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

/// `ln I0(x)`, finite for arbitrarily large `x`.
pub fn bessel_i0_log(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "bessel_i0_log",
            value: x,
        });
    }
    if x < BESSEL_SERIES_LIMIT {
        Ok(ln(i0_series(x)))
    } else {
        Ok(x - 0.5 * ln(2.0 * PI * x) + ln(scaled_asymptotic(0, x)))
    }
}

/// `e^{−x} I0(x)`.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "bessel_i0e",
            value: x,
        });
    }
    if x < BESSEL_SERIES_LIMIT {
        Ok(i0_series(x) * exp(-x))
    } else {
        Ok(scaled_asymptotic(0, x) / sqrt(2.0 * PI * x))
    }
}

/// `I1(x) / I0(x)`, the derivative of `ln I0`. Lies in `[0, 1)`.
pub fn bessel_ratio_i1_i0(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "bessel_ratio_i1_i0",
            value: x,
        });
    }
    if x < BESSEL_SERIES_LIMIT {
        Ok(i1_series(x) / i0_series(x))
    } else {
        Ok(scaled_asymptotic(1, x) / scaled_asymptotic(0, x))
    }
}

#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * exp(-0.5 * x * x)
}

/// `Φ(x) = erfc(−x/√2)/2`. Both tails are evaluated without cancellation.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * crate::math::erfc(-x * FRAC_1_SQRT_2)
}
