//! Score, Fisher information, the Cramér-Rao bound on `r`, and the
//! constrained MSE bound obtained by censoring a Gaussian surrogate
//! `R̂ ~ N(r, σ²_CR)` at zero.
//!
//! The Fisher matrix is per observation over `θ = (r, σ²_X, σ²_Y)`.
//!
//! # Quadrature scheme
//!
//! Work in normalised coordinates `ũ = u/σ²_X`, `w̃ = w/σ²_Y` (the σ² rows are
//! rescaled afterwards). Write `ũ = 2t` with `t ~ Exp(1)`; given `t`,
//! `y = w̃ / (2(1 − r))` has density `e^{−y−λ} I0(2√(λy))` with
//! `λ = r t / (1 − r)`. The outer integral runs over `s = √t ∈ [0, 8]`
//! (density `2s e^{−s²}`) and the inner over `q = √y` on a window of
//! half-width 9 around `c = √λ`, where the conditional density is
//! `2q e^{−(q−c)²} e^{−2cq} I0(2cq)`. Both are Gauss-Legendre rules, so the
//! mass stays resolved as `r → 1` and the integrand concentrates along the
//! diagonal. Default order is 200 x 200; the error estimate is the difference
//! against the half-order rule, and one retry at double order is made when
//! it exceeds the tolerance.

use alloc::vec::Vec;

use crate::linalg::{self, Matrix};
use crate::math::{exp, ln, sqrt};
use crate::model::{build_covariance, ModelParams};
use crate::quadrature::GaussLegendre;
use crate::sampling::{gaussian_quadruple, SeedSpec};
use crate::specfun::{bessel_i0_log, bessel_ratio_i1_i0, std_normal_cdf, std_normal_pdf};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Largest `r` accepted by [`fisher_info`].
pub const MAX_FISHER_R: f64 = 0.99;
/// Condition numbers above this make [`FisherMatrix::crb`] fail.
pub const MAX_CONDITION: f64 = 1e12;
/// Absolute tolerance on the quadrature error estimate.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

const OUTER_SPAN: f64 = 8.0;
const INNER_HALF_WIDTH: f64 = 9.0;

/// Gradient of `ln p_UW(u, w)` with respect to `(r, σ²_X, σ²_Y)`.
///
/// With `ζ = √(r ũ w̃)/(1 − r)` and `R = I1(ζ)/I0(ζ)`:
///
/// ```text
/// ∂_r   = 1/(1−r) − (ũ+w̃)/(2(1−r)²) + (R/ζ) · ũw̃(1+r)/(2(1−r)³)
/// ∂_σ²X = (−1 + ũ/(2(1−r)) − Rζ/2) / σ²_X
/// ```
///
/// `R/ζ → 1/2` as `ζ → 0`, so at `r = 0` the `r`-component is
/// `(1 − ũ/2)(1 − w̃/2) = 1 − (ũ+w̃)/2 + ũw̃/4`.
pub fn score(p: &ModelParams, u: f64, w: f64) -> Result<[f64; 3]> {
    if !(u >= 0.0) || !(w >= 0.0) {
        return Err(Error::Domain {
            what: "score",
            value: if u >= 0.0 { w } else { u },
        });
    }
    let r = p.r();
    if r >= 1.0 {
        return Err(Error::DegenerateDistribution);
    }
    let omr = 1.0 - r;
    let ut = u / p.sigma2_x();
    let wt = w / p.sigma2_y();
    let prod = ut * wt;
    let zeta = sqrt(r * prod) / omr;
    let ratio = bessel_ratio_i1_i0(zeta)?;
    let ratio_over_zeta = if zeta > 0.0 { ratio / zeta } else { 0.5 };
    let s_r = 1.0 / omr - (ut + wt) / (2.0 * omr * omr)
        + ratio_over_zeta * prod * (1.0 + r) / (2.0 * omr * omr * omr);
    let bessel_half = 0.5 * ratio * zeta;
    let s_x = (-1.0 + ut / (2.0 * omr) - bessel_half) / p.sigma2_x();
    let s_y = (-1.0 + wt / (2.0 * omr) - bessel_half) / p.sigma2_y();
    Ok([s_r, s_x, s_y])
}

/// Symmetric 3x3 Fisher information over `(r, σ²_X, σ²_Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix {
    entries: Matrix<3>,
}

impl FisherMatrix {
    /// Symmetrises `entries` by averaging with its transpose.
    pub fn new(entries: [[f64; 3]; 3]) -> Self {
        let mut e = entries;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let m = 0.5 * (e[i][j] + e[j][i]);
                e[i][j] = m;
                e[j][i] = m;
            }
        }
        Self { entries: e }
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        linalg::symmetric_eigenvalues(self.entries)
    }

    /// `λ_max / λ_min`; infinite when `λ_min <= 0`.
    pub fn condition_number(&self) -> f64 {
        let e = self.eigenvalues();
        if e[0] <= 0.0 {
            f64::INFINITY
        } else {
            e[2] / e[0]
        }
    }

    pub fn inverse(&self) -> Result<[[f64; 3]; 3]> {
        let condition = self.condition_number();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        linalg::invert(&self.entries).ok_or(Error::IllConditioned { condition })
    }

    /// `σ²_CR(r) = [I⁻¹]₁₁ / n`.
    pub fn crb(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain {
                what: "crb sample size",
                value: 0.0,
            });
        }
        Ok(self.inverse()?[0][0] / n as f64)
    }

    fn rescaled(unit: Matrix<3>, p: &ModelParams) -> Self {
        let scale = [1.0, 1.0 / p.sigma2_x(), 1.0 / p.sigma2_y()];
        let mut e = unit;
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= scale[i] * scale[j];
            }
        }
        Self::new(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrder {
    pub outer: usize,
    pub inner: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        Self {
            outer: 200,
            inner: 200,
        }
    }
}

impl QuadratureOrder {
    fn scaled(self, num: usize, den: usize) -> Self {
        Self {
            outer: (self.outer * num / den).max(2),
            inner: (self.inner * num / den).max(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FisherMethod {
    Quadrature(QuadratureOrder),
    /// Mean of the score outer product over `draws` model samples.
    MonteCarlo { draws: u64, seed: u64 },
}

impl Default for FisherMethod {
    fn default() -> Self {
        FisherMethod::Quadrature(QuadratureOrder::default())
    }
}

fn check_fisher_r(p: &ModelParams) -> Result<()> {
    if p.r() > MAX_FISHER_R {
        Err(Error::Domain {
            what: "fisher_info (r above 0.99)",
            value: p.r(),
        })
    } else {
        Ok(())
    }
}

/// Raw tensor-product quadrature in unit-variance coordinates.
fn fisher_unit_quadrature(r: f64, order: QuadratureOrder) -> Result<Matrix<3>> {
    let unit = ModelParams::unit(r)?;
    let outer = GaussLegendre::new(order.outer);
    let inner = GaussLegendre::new(order.inner);
    let omr = 1.0 - r;
    let c_per_s = sqrt(r / omr);
    let mut acc = [[NeumaierSum::new(); 3]; 3];
    for (s, ws) in outer.mapped(0.0, OUTER_SPAN) {
        let t = s * s;
        let outer_density = 2.0 * s * exp(-t);
        if outer_density == 0.0 {
            continue;
        }
        let c = c_per_s * s;
        let lo = (c - INNER_HALF_WIDTH).max(0.0);
        let hi = c + INNER_HALF_WIDTH;
        let ut = 2.0 * t;
        for (q, wq) in inner.mapped(lo, hi) {
            let arg = 2.0 * c * q;
            let log_density = ln(2.0 * q) - (q - c) * (q - c) + bessel_i0_log(arg)? - arg;
            let density = exp(log_density);
            if density == 0.0 {
                continue;
            }
            let wt = 2.0 * omr * q * q;
            let g = score(&unit, ut, wt)?;
            let weight = ws * wq * outer_density * density;
            for i in 0..3 {
                for j in i..3 {
                    acc[i][j].add(weight * g[i] * g[j]);
                }
            }
        }
    }
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            m[i][j] = acc[i][j].value();
            m[j][i] = m[i][j];
        }
    }
    Ok(m)
}

fn max_abs_diff(a: &Matrix<3>, b: &Matrix<3>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

/// Quadrature Fisher matrix together with its error estimate.
pub fn fisher_info_quadrature(p: &ModelParams, order: QuadratureOrder) -> Result<(FisherMatrix, f64)> {
    check_fisher_r(p)?;
    let mut order = order;
    let mut attempt = 0;
    loop {
        let fine = fisher_unit_quadrature(p.r(), order)?;
        let coarse = fisher_unit_quadrature(p.r(), order.scaled(1, 2))?;
        let fine_m = FisherMatrix::rescaled(fine, p);
        let coarse_m = FisherMatrix::rescaled(coarse, p);
        let achieved = max_abs_diff(&fine_m.entries, &coarse_m.entries);
        if achieved <= QUADRATURE_TOLERANCE {
            return Ok((fine_m, achieved));
        }
        if attempt == 1 {
            return Err(Error::Accuracy {
                achieved,
                tolerance: QUADRATURE_TOLERANCE,
                estimate: fine_m,
            });
        }
        attempt += 1;
        order = order.scaled(2, 1);
    }
}

/// Monte Carlo Fisher matrix with entrywise standard errors, plus the
/// sample mean of the score (zero in expectation) and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloFisher {
    pub matrix: FisherMatrix,
    pub std_error: [[f64; 3]; 3],
    pub mean_score: [f64; 3],
    pub mean_score_se: [f64; 3],
    pub draws: u64,
}

/// Draws per random stream in [`fisher_info_mc`]; block `b` uses stream `b`.
pub const MC_BLOCK: u64 = 1 << 16;

/// Accumulators for one block of Monte Carlo Fisher draws. Blocks merge in
/// index order, so a parallel caller reproduces the serial result exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct FisherBlock {
    first: [NeumaierSum; 3],
    second: [NeumaierSum; 3],
    outer: [[NeumaierSum; 3]; 3],
    outer_sq: [[NeumaierSum; 3]; 3],
    count: u64,
}

impl FisherBlock {
    /// Draws `count` samples from stream `(seed, block)`.
    pub fn draw(p: &ModelParams, seed: u64, block: u64, count: u64) -> Result<Self> {
        let cov = build_covariance(p, 0.0);
        let mut rng = SeedSpec::new(seed, block).rng();
        let mut acc = FisherBlock::default();
        for _ in 0..count {
            let [xi, xq, yi, yq] = gaussian_quadruple(&cov, &mut rng);
            let g = score(p, xi * xi + xq * xq, yi * yi + yq * yq)?;
            for i in 0..3 {
                acc.first[i].add(g[i]);
                acc.second[i].add(g[i] * g[i]);
                for j in i..3 {
                    let prod = g[i] * g[j];
                    acc.outer[i][j].add(prod);
                    acc.outer_sq[i][j].add(prod * prod);
                }
            }
        }
        acc.count = count;
        Ok(acc)
    }

    pub fn merge(&mut self, other: &FisherBlock) {
        for i in 0..3 {
            self.first[i].merge(&other.first[i]);
            self.second[i].merge(&other.second[i]);
            for j in 0..3 {
                self.outer[i][j].merge(&other.outer[i][j]);
                self.outer_sq[i][j].merge(&other.outer_sq[i][j]);
            }
        }
        self.count += other.count;
    }

    pub fn finish(&self) -> MonteCarloFisher {
        let n = self.count as f64;
        let mut m = [[0.0; 3]; 3];
        let mut se = [[0.0; 3]; 3];
        let mut mean = [0.0; 3];
        let mut mean_se = [0.0; 3];
        for i in 0..3 {
            mean[i] = self.first[i].value() / n;
            let var = (self.second[i].value() / n - mean[i] * mean[i]).max(0.0);
            mean_se[i] = sqrt(var / n);
            for j in i..3 {
                let mu = self.outer[i][j].value() / n;
                let var = (self.outer_sq[i][j].value() / n - mu * mu).max(0.0);
                m[i][j] = mu;
                m[j][i] = mu;
                se[i][j] = sqrt(var / n);
                se[j][i] = se[i][j];
            }
        }
        MonteCarloFisher {
            matrix: FisherMatrix::new(m),
            std_error: se,
            mean_score: mean,
            mean_score_se: mean_se,
            draws: self.count,
        }
    }
}

/// Splits `draws` into `(block index, count)` pairs of at most [`MC_BLOCK`].
pub fn mc_blocks(draws: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = draws / MC_BLOCK;
    let rest = draws % MC_BLOCK;
    (0..full)
        .map(|b| (b, MC_BLOCK))
        .chain((rest > 0).then_some((full, rest)))
}

pub fn fisher_info_mc(p: &ModelParams, draws: u64, seed: u64) -> Result<MonteCarloFisher> {
    check_fisher_r(p)?;
    if draws < 2 {
        return Err(Error::Domain {
            what: "fisher_info_mc draws",
            value: draws as f64,
        });
    }
    let mut total = FisherBlock::default();
    for (block, count) in mc_blocks(draws) {
        total.merge(&FisherBlock::draw(p, seed, block, count)?);
    }
    Ok(total.finish())
}

/// Per-observation Fisher information for `0 <= r <= 0.99`.
pub fn fisher_info(p: &ModelParams, method: FisherMethod) -> Result<FisherMatrix> {
    match method {
        FisherMethod::Quadrature(order) => Ok(fisher_info_quadrature(p, order)?.0),
        FisherMethod::MonteCarlo { draws, seed } => Ok(fisher_info_mc(p, draws, seed)?.matrix),
    }
}

/// `σ²_CR(r)` for `n` observations.
pub fn crb(p: &ModelParams, n: usize, method: FisherMethod) -> Result<f64> {
    fisher_info(p, method)?.crb(n)
}

/// Mean-square error of `max(R̂, 0)` for `R̂ ~ N(r, σ²_CR)`, split into
/// variance and squared bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseBound {
    pub variance: f64,
    pub bias_squared: f64,
    /// `γ = F(−μ)`, the probability mass censored to zero.
    pub censor_prob: f64,
}

impl MseBound {
    #[inline]
    pub fn total(&self) -> f64 {
        self.variance + self.bias_squared
    }
}

/// Constrained MSE bound with `μ = r/σ_CR`, `h = φ(μ)/F(μ)`, `d = h(h + μ)`:
///
/// ```text
/// variance     = σ²_CR F(μ) [(1 − d) + F(−μ)(μ + h)²]
/// bias_squared = [F(μ)(r + h σ_CR) − r]²
/// ```
pub fn mse_bound(r: f64, sigma2_cr: f64) -> Result<MseBound> {
    if !(sigma2_cr > 0.0 && sigma2_cr.is_finite()) {
        return Err(Error::Domain {
            what: "mse_bound sigma2_cr",
            value: sigma2_cr,
        });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain {
            what: "mse_bound r",
            value: r,
        });
    }
    let sigma = sqrt(sigma2_cr);
    let mu = r / sigma;
    let f_mu = std_normal_cdf(mu);
    let f_neg = std_normal_cdf(-mu);
    let h = std_normal_pdf(mu) / f_mu;
    let d = h * (h + mu);
    let variance = sigma2_cr * f_mu * ((1.0 - d) + f_neg * (mu + h) * (mu + h));
    let bias = f_mu * (r + h * sigma) - r;
    Ok(MseBound {
        variance,
        bias_squared: bias * bias,
        censor_prob: f_neg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub r: f64,
    pub sigma2_cr: f64,
    pub eps2_ms: f64,
    /// `r < 3 σ_CR(r)`: the region where censoring visibly lowers the bound.
    pub region_flag: bool,
    pub condition: f64,
}

impl BoundPoint {
    pub fn from_fisher(r: f64, fim: &FisherMatrix, n: usize) -> Result<Self> {
        let sigma2_cr = fim.crb(n)?;
        let eps2_ms = mse_bound(r, sigma2_cr)?.total();
        Ok(Self {
            r,
            sigma2_cr,
            eps2_ms,
            region_flag: r < 3.0 * sqrt(sigma2_cr),
            condition: fim.condition_number(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub n: usize,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    /// Joins precomputed Fisher matrices `(r, I(r))` into a curve for `n`.
    pub fn from_fisher(n: usize, fims: &[(f64, FisherMatrix)]) -> Result<Self> {
        let points = fims
            .iter()
            .map(|(r, fim)| BoundPoint::from_fisher(*r, fim, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, points })
    }

    /// Linear lookup by `r` (exact match within 1e-12).
    pub fn at(&self, r: f64) -> Option<&BoundPoint> {
        self.points.iter().find(|p| (p.r - r).abs() <= 1e-12)
    }
}

/// `σ²_CR` and `ε²_MS` on `r_grid`, using `template`'s variances.
pub fn bound_curve(n: usize, r_grid: &[f64], template: &ModelParams, method: FisherMethod) -> Result<BoundCurve> {
    let fims = r_grid
        .iter()
        .map(|&r| {
            let p = template.with_r(r)?;
            Ok((r, fisher_info(&p, method)?))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundCurve::from_fisher(n, &fims)
}
