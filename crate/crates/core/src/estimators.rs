//! Sample moments and the three censored estimators of `r`.
//!
//! | estimator | statistic                           | transform |
//! |-----------|-------------------------------------|-----------|
//! | `r1`      | Pearson `s(u, w)` of the powers     | identity  |
//! | `r2`      | Pearson `s(v, z)` of the envelopes  | `ξ`       |
//! | `r3`      | cosine similarity² `c²(v, z)`       | `η`       |
//!
//! Each transformed statistic is censored at zero. Raw values never exceed
//! one (Cauchy-Schwarz, and both transforms map `[0, 1]` onto itself), so
//! there is no upper censoring.

use core::fmt;
use core::str::FromStr;

use crate::math::{sqrt, PI};
use crate::model::MomentSet;
use crate::sampling::PairedSample;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Calibration gain of `ξ`.
pub const XI_GAIN: f64 = 49.0 / 500.0;
/// Offset `a = π²/16` of `η`: the independence limit of `c²`.
pub const ETA_OFFSET: f64 = PI * PI / 16.0;
/// Calibration gain `b` of `η`.
pub const ETA_GAIN: f64 = 7.0 / 12.0;

/// Raw statistics may exceed one by rounding only.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `(u, w)`
    Exponential,
    /// `(v, z)`
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub moments: MomentSet,
    pub family: Family,
    pub n: usize,
}

impl SampleMoments {
    /// Computes the five moments of `(a, b)` with compensated sums.
    pub fn from_pairs(a: &[f64], b: &[f64], family: Family) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        if a.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut s10 = NeumaierSum::new();
        let mut s01 = NeumaierSum::new();
        let mut s20 = NeumaierSum::new();
        let mut s02 = NeumaierSum::new();
        let mut s11 = NeumaierSum::new();
        for (&x, &y) in a.iter().zip(b) {
            s10.add(x);
            s01.add(y);
            s20.add(x * x);
            s02.add(y * y);
            s11.add(x * y);
        }
        let n = a.len() as f64;
        Ok(Self {
            moments: MomentSet {
                m10: s10.value() / n,
                m01: s01.value() / n,
                m20: s20.value() / n,
                m02: s02.value() / n,
                m11: s11.value() / n,
            },
            family,
            n: a.len(),
        })
    }
}

pub fn sample_moments(s: &PairedSample, family: Family) -> Result<SampleMoments> {
    match family {
        Family::Exponential => SampleMoments::from_pairs(s.u(), s.w(), family),
        Family::Rayleigh => SampleMoments::from_pairs(s.v(), s.z(), family),
    }
}

fn variance_or_degenerate(second: f64, first: f64) -> Result<f64> {
    let var = second - first * first;
    // Below this the difference is indistinguishable from rounding in m20.
    if var <= 4.0 * f64::EPSILON * second.abs() {
        Err(Error::DegenerateSample("zero sample variance"))
    } else {
        Ok(var)
    }
}

/// Sample Pearson coefficient in the `m20 − m10²` form (1/n normalisation).
pub fn pearson_stat(m: &SampleMoments) -> Result<f64> {
    let mm = &m.moments;
    let va = variance_or_degenerate(mm.m20, mm.m10)?;
    let vb = variance_or_degenerate(mm.m02, mm.m01)?;
    Ok(mm.cov() / sqrt(va * vb))
}

/// Squared cosine similarity `m11² / (m20 m02)`.
pub fn cos2_stat(m: &SampleMoments) -> Result<f64> {
    let mm = &m.moments;
    if !(mm.m20 > 0.0) || !(mm.m02 > 0.0) {
        return Err(Error::DegenerateSample("zero second moment"));
    }
    Ok(mm.m11 * mm.m11 / (mm.m20 * mm.m02))
}

/// `ξ(s) = s (1 + g (1 − s))`.
#[inline]
pub fn xi_transform(s: f64) -> f64 {
    s * (1.0 + XI_GAIN * (1.0 - s))
}

/// `η(c²) = (c² − a)/(1 − a) · (1 + b (1 − c²))`.
#[inline]
pub fn eta_transform(c2: f64) -> f64 {
    (c2 - ETA_OFFSET) / (1.0 - ETA_OFFSET) * (1.0 + ETA_GAIN * (1.0 - c2))
}

/// A censored estimate with its pre-censoring statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub raw: f64,
    /// The raw statistic was negative and the value was set to zero.
    pub censored: bool,
}

impl Estimate {
    pub fn censor(raw: f64) -> Result<Self> {
        if !raw.is_finite() {
            return Err(Error::Internal("non-finite raw statistic"));
        }
        if raw > 1.0 + ROUNDING_SLACK {
            return Err(Error::Internal("raw statistic exceeds one"));
        }
        if raw < 0.0 {
            Ok(Self {
                value: 0.0,
                raw,
                censored: true,
            })
        } else {
            Ok(Self {
                value: raw.min(1.0),
                raw,
                censored: false,
            })
        }
    }
}

pub fn estimate_r1(s: &PairedSample) -> Result<Estimate> {
    let m = sample_moments(s, Family::Exponential)?;
    Estimate::censor(pearson_stat(&m)?)
}

pub fn estimate_r2(s: &PairedSample) -> Result<Estimate> {
    let m = sample_moments(s, Family::Rayleigh)?;
    Estimate::censor(xi_transform(pearson_stat(&m)?))
}

pub fn estimate_r3(s: &PairedSample) -> Result<Estimate> {
    let m = sample_moments(s, Family::Rayleigh)?;
    Estimate::censor(eta_transform(cos2_stat(&m)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    R1,
    R2,
    R3,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::R1, Estimator::R2, Estimator::R3];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::R1 => "r1",
            Estimator::R2 => "r2",
            Estimator::R3 => "r3",
        }
    }

    pub fn estimate(self, s: &PairedSample) -> Result<Estimate> {
        match self {
            Estimator::R1 => estimate_r1(s),
            Estimator::R2 => estimate_r2(s),
            Estimator::R3 => estimate_r3(s),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEstimator;

impl fmt::Display for UnknownEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown estimator (expected r1, r2 or r3)")
    }
}

impl FromStr for Estimator {
    type Err = UnknownEstimator;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim() {
            "r1" | "R1" => Ok(Estimator::R1),
            "r2" | "R2" => Ok(Estimator::R2),
            "r3" | "R3" => Ok(Estimator::R3),
            _ => Err(UnknownEstimator),
        }
    }
}
