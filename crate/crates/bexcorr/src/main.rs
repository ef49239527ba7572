use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bexcorr::config;
use bexcorr::error::{Error, Result};
use bexcorr::formats::{self, EstimateRecord, Manifest, ReportFormat, SampleFormat};
use bexcorr::harness::{self, Preset, RGrid};
use bexcorr::plot;
use bexcorr_core::{
    bound_curve, sample_pairs, BoundCurve, Estimator, FisherMethod, ModelParams, SeedSpec,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bexcorr", version, about = "Correlation estimation for bivariate Rayleigh and exponential pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFmt {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFmt {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundMethod {
    Quad,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Draw n correlated pairs.
    Sample {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        sx2: f64,
        #[arg(long, default_value_t = 1.0)]
        sy2: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: SampleFmt,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate r from a sample file with columns v,z or u,w.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// r1, r2, r3 or all.
        #[arg(long, default_value = "all")]
        estimator: String,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFmt,
    },
    /// Cramér-Rao and MSE bounds on a grid of r.
    Bounds {
        #[arg(long)]
        n: usize,
        /// start:step:stop
        #[arg(long, default_value = "0:0.02:0.98")]
        r_grid: RGrid,
        #[arg(long, value_enum, default_value = "quad")]
        method: BoundMethod,
        /// Monte Carlo draws per grid point (accepts 1e7).
        #[arg(long, default_value = "1e7")]
        draws: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sx2: f64,
        #[arg(long, default_value_t = 1.0)]
        sy2: f64,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo sweep over n and r; writes sweep.csv, manifest.json, plot.gp.
    Sweep {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Worker threads (all cores when omitted).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_count(what: &str, s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(f) if f >= 1.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
        _ => Err(Error::Config(format!("{what}: expected a positive count, got {s:?}"))),
    }
}

fn cmd_sample(
    p: ModelParams,
    n: usize,
    seed: SeedSpec,
    format: SampleFmt,
    out: Option<&Path>,
) -> Result<()> {
    let sample = sample_pairs(&p, n, seed)?;
    let format = match format {
        SampleFmt::Csv => SampleFormat::Csv,
        SampleFmt::Jsonl => SampleFormat::Jsonl,
    };
    formats::write_sample(&sample, format, output(out)?)
}

fn cmd_estimate(input: &Path, estimator: &str, format: ReportFmt) -> Result<()> {
    let estimators: Vec<Estimator> = if estimator == "all" {
        Estimator::ALL.to_vec()
    } else {
        vec![estimator.parse().map_err(|e| Error::Config(format!("{e}")))?]
    };
    let file = File::open(input).map_err(|e| Error::io(input, e))?;
    let sample = formats::read_sample(BufReader::new(file))?;
    let records = estimators
        .iter()
        .map(|&est| Ok(EstimateRecord::new(est, &est.estimate(&sample)?)))
        .collect::<Result<Vec<_>>>()?;
    let format = match format {
        ReportFmt::Json => ReportFormat::Json,
        ReportFmt::Csv => ReportFormat::Csv,
    };
    formats::write_estimates(&records, format, output(None)?)
}

fn cmd_bounds(n: usize, grid: &RGrid, method: BoundMethod, template: ModelParams, draws: u64, seed: u64) -> Result<BoundCurve> {
    if n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    grid.validate(bexcorr_core::bounds::MAX_FISHER_R)?;
    let r_values = grid.values();
    match method {
        BoundMethod::Quad => {
            let fims = harness::fisher_grid(&template, &r_values)?;
            Ok(BoundCurve::from_fisher(n, &fims)?)
        }
        BoundMethod::Mc => Ok(bound_curve(n, &r_values, &template, FisherMethod::MonteCarlo { draws, seed })?),
    }
}

fn cmd_sweep(config: Option<&Path>, preset: Option<PresetArg>, out_dir: &Path, threads: Option<usize>) -> Result<()> {
    let cfg = match (config, preset) {
        (Some(path), _) => config::load(path)?,
        (None, Some(PresetArg::Paper)) => harness::SweepConfig::preset(Preset::Paper),
        (None, _) => harness::SweepConfig::preset(Preset::Desk),
    };
    let threads = threads.unwrap_or_else(rayon::current_num_threads);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let result = harness::run_sweep_with_threads(&cfg, threads)?;

    let csv_path = out_dir.join("sweep.csv");
    let rows = formats::write_sweep_csv(&result, create(&csv_path)?)?;
    let manifest = Manifest::new(&result, threads, "sweep.csv", rows);
    let manifest_path = out_dir.join("manifest.json");
    formats::write_manifest(&manifest, create(&manifest_path)?)?;
    let plot_path = out_dir.join("plot.gp");
    std::fs::write(&plot_path, plot::gnuplot_script(&cfg, "sweep.csv")).map_err(|e| Error::io(&plot_path, e))?;
    eprintln!(
        "wrote {} rows to {} in {:.1} s",
        rows,
        csv_path.display(),
        result.wall_time_secs
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample { r, sx2, sy2, n, seed, stream, format, out } => {
            let p = ModelParams::new(r, sx2, sy2)?;
            cmd_sample(p, n, SeedSpec::new(seed, stream), format, out.as_deref())
        }
        Command::Estimate { input, estimator, format } => cmd_estimate(&input, &estimator, format),
        Command::Bounds { n, r_grid, method, draws, seed, sx2, sy2, out } => {
            let template = ModelParams::new(0.0, sx2, sy2)?;
            let draws = parse_count("draws", &draws)?;
            let curve = cmd_bounds(n, &r_grid, method, template, draws, seed)?;
            formats::write_bound_curve(&curve, output(out.as_deref())?)
        }
        Command::Sweep { config, preset, out_dir, threads } => {
            cmd_sweep(config.as_deref(), preset, &out_dir, threads)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bexcorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
