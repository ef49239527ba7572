//! Reproducible paired observations.
//!
//! Every sample is drawn from a ChaCha8 stream addressed by
//! `(master_seed, stream_id)`, so replication `i` of a Monte Carlo run gets
//! the same data no matter which thread draws it. Normals come from
//! `rand_distr::StandardNormal` (ziggurat); changing either the generator or
//! the normal algorithm changes every golden output.
//!
//! Per pair, four normals are drawn in the order `a_I, a_Q, e_I, e_Q`;
//! `(a_I, a_Q)` build `X` and `(e_I, e_Q)` are the innovations of `Y`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::math::sqrt;
use crate::model::{build_covariance, GaussCovariance, ModelParams};
use crate::{Error, Result};

/// Address of one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `n` pairs in both Rayleigh `(v, z)` and exponential `(u, w)` form.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    v: Vec<f64>,
    z: Vec<f64>,
    u: Vec<f64>,
    w: Vec<f64>,
}

fn check_pairs(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(&bad) = a.iter().chain(b).find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::Domain {
            what: "paired sample",
            value: bad,
        });
    }
    Ok(())
}

impl PairedSample {
    /// From Rayleigh magnitudes; `u = v²`, `w = z²`.
    pub fn from_rayleigh(v: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        check_pairs(&v, &z)?;
        let u = v.iter().map(|x| x * x).collect();
        let w = z.iter().map(|x| x * x).collect();
        Ok(Self { v, z, u, w })
    }

    /// From exponential values; `v = √u`, `z = √w` (correctly rounded, so
    /// `v²` may differ from `u` in the last ulp).
    pub fn from_exponential(u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        check_pairs(&u, &w)?;
        let v = u.iter().map(|&x| sqrt(x)).collect();
        let z = w.iter().map(|&x| sqrt(x)).collect();
        Ok(Self { v, z, u, w })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Rows `(v, z, u, w)`.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        (0..self.len()).map(move |i| [self.v[i], self.z[i], self.u[i], self.w[i]])
    }
}

/// One draw of `(x_I, x_Q, y_I, y_Q)` using the circular structure of the
/// covariance directly:
///
/// ```text
/// y_I = σ_Y (ρ_c a_I − ρ_s a_Q + κ e_I)
/// y_Q = σ_Y (ρ_s a_I + ρ_c a_Q + κ e_Q),   κ = √(1 − ρ_c² − ρ_s²)
/// ```
pub fn gaussian_quadruple<R: Rng + ?Sized>(cov: &GaussCovariance, rng: &mut R) -> [f64; 4] {
    let a_i: f64 = StandardNormal.sample(rng);
    let a_q: f64 = StandardNormal.sample(rng);
    let e_i: f64 = StandardNormal.sample(rng);
    let e_q: f64 = StandardNormal.sample(rng);
    let (rc, rs) = (cov.rho_c(), cov.rho_s());
    let kappa = sqrt((1.0 - rc * rc - rs * rs).max(0.0));
    let (sx, sy) = (cov.sigma_x(), cov.sigma_y());
    [
        sx * a_i,
        sx * a_q,
        sy * (rc * a_i - rs * a_q + kappa * e_i),
        sy * (rs * a_i + rc * a_q + kappa * e_q),
    ]
}

/// One draw as `L g` with `L` a Cholesky factor of the covariance and `g`
/// four standard normals. Equal in distribution to [`gaussian_quadruple`].
pub fn gaussian_quadruple_cholesky<R: Rng + ?Sized>(factor: &[[f64; 4]; 4], rng: &mut R) -> [f64; 4] {
    let mut g = [0.0; 4];
    for gi in &mut g {
        *gi = StandardNormal.sample(rng);
    }
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..=i).map(|k| factor[i][k] * g[k]).sum();
    }
    out
}

/// Draws `n` pairs from an explicit covariance.
pub fn sample_pairs_from_covariance(cov: &GaussCovariance, n: usize, seed: SeedSpec) -> Result<PairedSample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = seed.rng();
    let mut v = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for _ in 0..n {
        let [xi, xq, yi, yq] = gaussian_quadruple(cov, &mut rng);
        let vi = sqrt(xi * xi + xq * xq);
        let zi = sqrt(yi * yi + yq * yq);
        v.push(vi);
        z.push(zi);
        u.push(vi * vi);
        w.push(zi * zi);
    }
    Ok(PairedSample { v, z, u, w })
}

/// Draws `n` iid pairs with `ρ_s = 0`. Deterministic in `seed`.
pub fn sample_pairs(p: &ModelParams, n: usize, seed: SeedSpec) -> Result<PairedSample> {
    sample_pairs_from_covariance(&build_covariance(p, 0.0), n, seed)
}
