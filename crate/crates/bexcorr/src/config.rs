//! Sweep configuration files.
//!
//! Two forms are accepted:
//!
//! * plain text, one `key = value` per line, `#` comments. An optional
//!   `preset = desk|paper` line supplies defaults for the other keys:
//!
//!   ```text
//!   preset = desk
//!   n_list = 50
//!   r_grid = 0:0.1:0.9
//!   reps = 100000
//!   master_seed = 7
//!   estimators = r1,r2,r3
//!   sigma2_x = 1
//!   sigma2_y = 1
//!   ```
//!
//! * JSON: either a serialized [`SweepConfig`] or a run manifest written by
//!   a previous sweep, whose `config` member is used.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{Preset, SweepConfig};

pub fn load(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<SweepConfig> {
    let cfg = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_key_value(text)?
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_json(text: &str) -> Result<SweepConfig> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))?;
    let inner = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| Error::Config(format!("invalid sweep config: {e}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}"))))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    // accept 1e5-style integers
    if let Ok(v) = value.parse::<T>() {
        return Ok(v);
    }
    if let Ok(f) = value.parse::<f64>() {
        if f.fract() == 0.0 && f >= 0.0 {
            if let Ok(v) = format!("{}", f as u64).parse::<T>() {
                return Ok(v);
            }
        }
    }
    Err(Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_key_value(text: &str) -> Result<SweepConfig> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        entries.push((k.trim().to_string(), v.trim().to_string()));
    }

    let preset = match entries.iter().find(|(k, _)| k == "preset") {
        Some((_, v)) => v.parse::<Preset>()?,
        None => Preset::Desk,
    };
    let mut cfg = SweepConfig::preset(preset);
    for (key, value) in &entries {
        match key.as_str() {
            "preset" => {}
            "n_list" => cfg.n_list = parse_list(key, value)?,
            "r_grid" => cfg.r_grid = value.parse()?,
            "reps" => cfg.reps = parse_scalar(key, value)?,
            "master_seed" | "seed" => cfg.master_seed = parse_scalar(key, value)?,
            "estimators" => {
                cfg.estimators = if value == "all" {
                    bexcorr_core::Estimator::ALL.to_vec()
                } else {
                    parse_list(key, value)?
                }
            }
            "sigma2_x" => cfg.sigma2_x = parse_scalar(key, value)?,
            "sigma2_y" => cfg.sigma2_y = parse_scalar(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
    }
    Ok(cfg)
}
