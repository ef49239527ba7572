//! Monte Carlo sweep engine.
//!
//! A cell is one `(n, r)` combination. Replication `i` of a cell draws its
//! sample from stream `i` of the cell seed, and replications are accumulated
//! in fixed blocks of [`BLOCK_REPS`] that are merged in block order. The
//! output is therefore bit-identical for any number of worker threads.

use std::time::Instant;

use bexcorr_core::bounds::{fisher_info_quadrature, BoundCurve, FisherMatrix, QuadratureOrder};
use bexcorr_core::sum::NeumaierSum;
use bexcorr_core::{sample_pairs, Estimator, ModelParams, SeedSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Replications per accumulation block.
pub const BLOCK_REPS: u64 = 1024;
/// A cell fails when more than this fraction of replications is degenerate.
pub const MAX_DEGENERATE_FRACTION: f64 = 1e-6;
/// Largest `r` a sweep grid may contain.
pub const MAX_SWEEP_R: f64 = 0.98;

/// Arithmetic grid `start, start + step, ..., stop` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl RGrid {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self> {
        let g = Self { start, step, stop };
        g.validate(1.0)?;
        Ok(g)
    }

    /// Checks `0 <= start <= stop <= upper` and a positive step.
    pub fn validate(&self, upper: f64) -> Result<()> {
        if !(self.start >= 0.0 && self.stop <= upper + 1e-12 && self.start <= self.stop + 1e-12) {
            return Err(Error::Config(format!(
                "r grid {} must satisfy 0 <= start <= stop <= {upper}",
                self
            )));
        }
        if !(self.step > 0.0) && self.start != self.stop {
            return Err(Error::Config(format!("r grid step must be positive, got {}", self.step)));
        }
        Ok(())
    }

    /// Grid values, rounded to 12 decimals so `0.1 * 3` prints as `0.3`.
    pub fn values(&self) -> Vec<f64> {
        if self.step <= 0.0 {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl std::fmt::Display for RGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

impl std::str::FromStr for RGrid {
    type Err = Error;

    /// `start:step:stop`, or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {x:?} in r grid {s:?}")))
        };
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                RGrid::new(v, 0.0, v)
            }
            [a, b, c] => RGrid::new(num(a)?, num(b)?, num(c)?),
            _ => Err(Error::Config(format!("r grid {s:?} is not start:step:stop"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub r_grid: RGrid,
    pub reps: u64,
    pub master_seed: u64,
    #[serde(with = "estimator_names")]
    pub estimators: Vec<Estimator>,
    pub sigma2_x: f64,
    pub sigma2_y: f64,
}

mod estimator_names {
    use bexcorr_core::Estimator;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Estimator], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|e| e.name()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Estimator>, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        names
            .iter()
            .map(|n| n.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Desk,
    Paper,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::Config(format!("unknown preset {other:?} (expected desk or paper)"))),
        }
    }
}

impl SweepConfig {
    /// Sample sizes 10, 50, 200 over `r = 0:0.02:0.98`; `desk` runs 1e5
    /// replications per cell and `paper` 1e6.
    pub fn preset(preset: Preset) -> Self {
        Self {
            n_list: vec![10, 50, 200],
            r_grid: RGrid {
                start: 0.0,
                step: 0.02,
                stop: 0.98,
            },
            reps: match preset {
                Preset::Desk => 100_000,
                Preset::Paper => 1_000_000,
            },
            master_seed: 20_240_901,
            estimators: Estimator::ALL.to_vec(),
            sigma2_x: 1.0,
            sigma2_y: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list is empty".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("sample size {n} is below 2")));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        self.r_grid.validate(MAX_SWEEP_R)?;
        ModelParams::new(0.0, self.sigma2_x, self.sigma2_y).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Per-estimator statistics of `estimate − r` over one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub estimator: Estimator,
    pub mse: f64,
    pub bias: f64,
    /// `mse − bias²`, so the decomposition holds exactly.
    pub var: f64,
    pub censor_frac: f64,
    /// Standard error of `mse` from the fourth moment of the error.
    pub mc_se: f64,
    /// Replications that contributed.
    pub reps: u64,
    pub degenerate: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct ErrorAccumulator {
    e1: NeumaierSum,
    e2: NeumaierSum,
    e4: NeumaierSum,
    censored: u64,
    used: u64,
    degenerate: u64,
}

impl ErrorAccumulator {
    fn merge(&mut self, other: &ErrorAccumulator) {
        self.e1.merge(&other.e1);
        self.e2.merge(&other.e2);
        self.e4.merge(&other.e4);
        self.censored += other.censored;
        self.used += other.used;
        self.degenerate += other.degenerate;
    }

    fn finish(&self, estimator: Estimator) -> CellStats {
        let n = self.used as f64;
        let bias = self.e1.value() / n;
        let mse = self.e2.value() / n;
        let m4 = self.e4.value() / n;
        CellStats {
            estimator,
            mse,
            bias,
            var: mse - bias * bias,
            censor_frac: self.censored as f64 / n,
            mc_se: ((m4 - mse * mse).max(0.0) / n).sqrt(),
            reps: self.used,
            degenerate: self.degenerate,
        }
    }
}

fn run_block(
    p: &ModelParams,
    n: usize,
    seed: u64,
    range: std::ops::Range<u64>,
    estimators: &[Estimator],
) -> std::result::Result<Vec<ErrorAccumulator>, bexcorr_core::Error> {
    let r = p.r();
    let mut acc = vec![ErrorAccumulator::default(); estimators.len()];
    for i in range {
        let sample = sample_pairs(p, n, SeedSpec::new(seed, i))?;
        for (a, est) in acc.iter_mut().zip(estimators) {
            match est.estimate(&sample) {
                Ok(e) => {
                    let d = e.value - r;
                    let d2 = d * d;
                    a.e1.add(d);
                    a.e2.add(d2);
                    a.e4.add(d2 * d2);
                    a.used += 1;
                    a.censored += u64::from(e.censored);
                }
                Err(bexcorr_core::Error::DegenerateSample(_)) => a.degenerate += 1,
                Err(other) => return Err(other),
            }
        }
    }
    Ok(acc)
}

/// Runs `reps` replications at `(p, n)` from cell seed `seed`.
///
/// Uses the ambient rayon pool; the result does not depend on its size.
pub fn run_cell(p: &ModelParams, n: usize, reps: u64, estimators: &[Estimator], seed: u64) -> Result<Vec<CellStats>> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let blocks = reps.div_ceil(BLOCK_REPS);
    let partials = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK_REPS;
            let hi = (lo + BLOCK_REPS).min(reps);
            run_block(p, n, seed, lo..hi, estimators)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Numerical(format!("n={n}, r={}: {e}", p.r())))?;
    let mut total = vec![ErrorAccumulator::default(); estimators.len()];
    for part in &partials {
        for (t, a) in total.iter_mut().zip(part) {
            t.merge(a);
        }
    }
    total
        .iter()
        .zip(estimators)
        .map(|(acc, &est)| {
            let frac = acc.degenerate as f64 / reps as f64;
            if frac > MAX_DEGENERATE_FRACTION || acc.used == 0 {
                return Err(Error::Numerical(format!(
                    "n={n}, r={}: estimator {est} hit {} degenerate samples out of {reps}",
                    p.r(),
                    acc.degenerate
                )));
            }
            Ok(acc.finish(est))
        })
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the cell at sample size `n` and grid index `r_index`.
pub fn cell_seed(master_seed: u64, n: usize, r_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n as u64) ^ r_index as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    pub stats: CellStats,
    pub sigma2_cr: f64,
    pub eps2_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// Ordered by `n` (as listed), then `r`, then estimator.
    pub rows: Vec<SweepRow>,
    /// One curve per entry of `n_list`.
    pub bounds: Vec<BoundCurve>,
    pub wall_time_secs: f64,
}

impl SweepResult {
    pub fn row(&self, n: usize, r: f64, estimator: Estimator) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|row| row.n == n && (row.r - r).abs() < 1e-9 && row.stats.estimator == estimator)
    }

    pub fn bound(&self, n: usize) -> Option<&BoundCurve> {
        self.bounds.iter().find(|b| b.n == n)
    }
}

/// Fisher matrices on the grid, computed once and shared by every `n`.
pub fn fisher_grid(template: &ModelParams, r_values: &[f64]) -> Result<Vec<(f64, FisherMatrix)>> {
    r_values
        .par_iter()
        .map(|&r| {
            let p = template.with_r(r).map_err(|e| Error::Config(e.to_string()))?;
            fisher_info_quadrature(&p, QuadratureOrder::default())
                .map(|(f, _)| (r, f))
                .map_err(|e| Error::Numerical(format!("Fisher information at r={r}: {e}")))
        })
        .collect()
}

/// Runs every cell of `cfg` in the ambient rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let started = Instant::now();
    let r_values = cfg.r_grid.values();
    let template = ModelParams::new(0.0, cfg.sigma2_x, cfg.sigma2_y).map_err(|e| Error::Config(e.to_string()))?;
    let fims = fisher_grid(&template, &r_values)?;
    let bounds = cfg
        .n_list
        .iter()
        .map(|&n| BoundCurve::from_fisher(n, &fims).map_err(|e| Error::Numerical(format!("bound curve n={n}: {e}"))))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(cfg.n_list.len() * r_values.len() * cfg.estimators.len());
    for (curve, &n) in bounds.iter().zip(&cfg.n_list) {
        for (k, (&r, point)) in r_values.iter().zip(&curve.points).enumerate() {
            let p = template.with_r(r).map_err(|e| Error::Config(e.to_string()))?;
            let stats = run_cell(&p, n, cfg.reps, &cfg.estimators, cell_seed(cfg.master_seed, n, k))?;
            rows.extend(stats.into_iter().map(|stats| SweepRow {
                n,
                r,
                stats,
                sigma2_cr: point.sigma2_cr,
                eps2_ms: point.eps2_ms,
            }));
        }
    }
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        bounds,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

/// [`run_sweep`] inside a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}
