//! Std companion of `bexcorr-core`: the parallel Monte Carlo sweep, the
//! CSV/JSON file formats and the `bexcorr` command line.

pub mod config;
pub mod error;
pub mod formats;
pub mod harness;
pub mod plot;

pub use error::{Error, Result};
pub use harness::{run_cell, run_sweep, run_sweep_with_threads, CellStats, Preset, RGrid, SweepConfig, SweepResult, SweepRow};
