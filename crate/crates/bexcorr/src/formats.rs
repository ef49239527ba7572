//! File formats: sample tables, estimate reports, bound curves, the sweep
//! CSV and the JSON run manifest.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is a pure function of the computed values.

use std::io::{Read, Write};

use bexcorr_core::{BoundCurve, Estimate, Estimator, PairedSample};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{SweepConfig, SweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for SampleFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SampleFormat::Csv),
            "jsonl" => Ok(SampleFormat::Jsonl),
            other => Err(Error::Config(format!("unknown sample format {other:?}"))),
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io_err(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Columns `v,z,u,w`, one row per pair.
pub fn write_sample<W: Write>(sample: &PairedSample, format: SampleFormat, out: W) -> Result<()> {
    match format {
        SampleFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["v", "z", "u", "w"]).map_err(csv_err)?;
            for row in sample.rows() {
                w.write_record(row.iter().map(|x| x.to_string())).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)
        }
        SampleFormat::Jsonl => {
            let mut out = out;
            for [v, z, u, w] in sample.rows() {
                let line = serde_json::json!({ "v": v, "z": z, "u": u, "w": w });
                writeln!(out, "{line}").map_err(io_err)?;
            }
            out.flush().map_err(io_err)
        }
    }
}

/// Reads a CSV with header columns `v,z` (Rayleigh) or `u,w` (exponential).
/// When both pairs are present the Rayleigh columns are used.
pub fn read_sample<R: Read>(input: R) -> Result<PairedSample> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (a_idx, b_idx, rayleigh) = match (col("v"), col("z"), col("u"), col("w")) {
        (Some(v), Some(z), _, _) => (v, z, true),
        (_, _, Some(u), Some(w)) => (u, w, false),
        _ => return Err(Error::Format("input needs columns v,z or u,w".into())),
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |idx: usize| -> Result<f64> {
            rec.get(idx)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Format(format!("row {}: bad value in column {}", i + 1, idx + 1)))
        };
        a.push(field(a_idx)?);
        b.push(field(b_idx)?);
    }
    let sample = if rayleigh {
        PairedSample::from_rayleigh(a, b)
    } else {
        PairedSample::from_exponential(a, b)
    };
    sample.map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EstimateRecord {
    pub estimator: String,
    pub value: f64,
    pub raw: f64,
    pub censored: bool,
}

impl EstimateRecord {
    pub fn new(estimator: Estimator, e: &Estimate) -> Self {
        Self {
            estimator: estimator.name().to_string(),
            value: e.value,
            raw: e.raw,
            censored: e.censored,
        }
    }
}

/// JSON: an array of records. CSV: `estimator,value,raw,censored`.
pub fn write_estimates<W: Write>(records: &[EstimateRecord], format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Format(e.to_string()))?;
            writeln!(out).map_err(io_err)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["estimator", "value", "raw", "censored"]).map_err(csv_err)?;
            for r in records {
                w.write_record([
                    r.estimator.clone(),
                    r.value.to_string(),
                    r.raw.to_string(),
                    r.censored.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

/// Columns `r,n,sigma2_cr,eps2_ms,region_flag`.
pub fn write_bound_curve<W: Write>(curve: &BoundCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "n", "sigma2_cr", "eps2_ms", "region_flag"]).map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([
            p.r.to_string(),
            curve.n.to_string(),
            p.sigma2_cr.to_string(),
            p.eps2_ms.to_string(),
            p.region_flag.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

pub const SWEEP_COLUMNS: [&str; 13] = [
    "kind",
    "n",
    "r",
    "estimator",
    "mse_hat",
    "bias_hat",
    "var_hat",
    "censor_frac",
    "mc_se",
    "sigma2_cr",
    "eps2_ms",
    "reps",
    "master_seed",
];

/// For each `n`, for each `r`: one `bound` row followed by one `estimate`
/// row per estimator. Estimate-only columns are empty on bound rows.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<usize> {
    let cfg = &result.config;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    let mut count = 0;
    let seed = cfg.master_seed.to_string();
    let reps = cfg.reps.to_string();
    for curve in &result.bounds {
        for point in &curve.points {
            w.write_record([
                "bound",
                &curve.n.to_string(),
                &point.r.to_string(),
                "",
                "",
                "",
                "",
                "",
                "",
                &point.sigma2_cr.to_string(),
                &point.eps2_ms.to_string(),
                &reps,
                &seed,
            ])
            .map_err(csv_err)?;
            count += 1;
            for row in result
                .rows
                .iter()
                .filter(|row| row.n == curve.n && row.r == point.r)
            {
                let s = &row.stats;
                w.write_record([
                    "estimate",
                    &row.n.to_string(),
                    &row.r.to_string(),
                    s.estimator.name(),
                    &s.mse.to_string(),
                    &s.bias.to_string(),
                    &s.var.to_string(),
                    &s.censor_frac.to_string(),
                    &s.mc_se.to_string(),
                    &row.sigma2_cr.to_string(),
                    &row.eps2_ms.to_string(),
                    &s.reps.to_string(),
                    &seed,
                ])
                .map_err(csv_err)?;
                count += 1;
            }
        }
    }
    w.flush().map_err(io_err)?;
    Ok(count)
}

/// Everything needed to rerun a sweep; `bexcorr sweep --config` accepts it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub master_seed: u64,
    pub threads: usize,
    pub csv: String,
    pub csv_rows: usize,
    pub degenerate_samples: u64,
    pub rng: String,
    pub normal_sampler: String,
    pub fisher_quadrature: String,
    pub wall_time_secs: f64,
}

impl Manifest {
    pub fn new(result: &SweepResult, threads: usize, csv: &str, csv_rows: usize) -> Self {
        Self {
            tool: "bexcorr".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: result.config.clone(),
            master_seed: result.config.master_seed,
            threads,
            csv: csv.into(),
            csv_rows,
            degenerate_samples: result.rows.iter().map(|r| r.stats.degenerate).sum(),
            rng: "ChaCha8, stream = replication index, seed = splitmix64(master, n, r index)".into(),
            normal_sampler: "rand_distr::StandardNormal (ziggurat)".into(),
            fisher_quadrature: "Gauss-Legendre 200x200 in (sqrt t, sqrt y)".into(),
            wall_time_secs: result.wall_time_secs,
        }
    }
}

pub fn write_manifest<W: Write>(manifest: &Manifest, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, manifest).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(out).map_err(io_err)
}
