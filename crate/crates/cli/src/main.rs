//! `uplink`: run densification sweeps, closed-form validation, per-uplink
//! rate curves, and generate synthetic station layouts.
//!
//! Exit codes: 0 success, 1 other runtime failure, 2 usage or config error,
//! 3 infeasible mobile placement.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uplink_core::experiment::{synthetic_stations, Experiment};
use uplink_core::oracle::{miss_allowance, validate_case, validation_cases, ValidationResult};
use uplink_core::par::Execution;
use uplink_core::topology::{NetworkTopology, Rect};

use config::{Format, RunConfig};

/// Environment variable giving the default worker thread count.
const THREADS_ENV: &str = "UPLINK_THREADS";
const MIN_VALIDATION_DRAWS: u64 = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] uplink_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use uplink_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParameter(_) | E::Topology(_) | E::Csv(_)) => 2,
            CliError::Core(E::PlacementInfeasible { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "uplink",
    version,
    about = "Outage and area spectral efficiency of a frequency-hopping mmWave uplink"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average outage and area spectral efficiency across the C/M grid.
    Sweep(RunArgs),
    /// Compare the closed-form outage with Monte Carlo estimates.
    Validate(ValidateArgs),
    /// Outage versus code rate for uplinks of one realization.
    RateCurve(RateCurveArgs),
    /// Write a jittered-grid station layout as CSV.
    GenTopology(GenTopologyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.experiment.seed = s;
        }
        if let Some(n) = self.trials {
            cfg.experiment.trials = n;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.experiment.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RateCurveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Number of uplinks to report.
    #[arg(long)]
    uplinks: Option<usize>,
    /// Base-station-to-mobile ratio of the realization.
    #[arg(long)]
    cm: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1_000_000)]
    draws: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Noise-only cases, checked against the gamma CDF.
    #[arg(long)]
    no_interference: bool,
    /// Also write the report to this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GenTopologyArgs {
    #[arg(long, default_value_t = 121)]
    stations: usize,
    /// Side of the square region, km.
    #[arg(long, default_value_t = 30.0)]
    region: f64,
    /// Displacement bound as a fraction of the grid spacing.
    #[arg(long, default_value_t = 0.35)]
    jitter: f64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execution() -> Execution {
    if Execution::parallel_available() {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    if n == 0 {
        return Err(CliError::Config(format!("{THREADS_ENV} must be positive")));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let exp = Experiment::new(cfg.experiment.clone(), cfg.build_topology()?)?;
    let rows = exp.sweep(execution())?;
    fs::create_dir_all(&cfg.output.dir)?;
    let path = output::write_sweep(&cfg.output.dir, cfg.output.format, &rows)?;
    eprintln!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn cmd_rate_curve(args: &RateCurveArgs) -> Result<(), CliError> {
    let mut cfg = args.run.resolve()?;
    if let Some(n) = args.uplinks {
        cfg.rate_curve.uplinks = n;
    }
    if let Some(cm) = args.cm {
        cfg.rate_curve.cm_ratio = cm;
    }
    if cfg.rate_curve.uplinks == 0 {
        return Err(CliError::Config("need at least one uplink".into()));
    }
    let rates = cfg.rate_curve.rates()?;
    let exp = Experiment::new(cfg.experiment.clone(), cfg.build_topology()?)?;
    let study = exp.rate_curves(
        cfg.rate_curve.cm_ratio,
        cfg.rate_curve.uplinks,
        &rates,
        cfg.rate_curve.shadowing,
    )?;
    fs::create_dir_all(&cfg.output.dir)?;
    let path = output::write_rate_curves(&cfg.output.dir, cfg.output.format, &study.chosen)?;
    eprintln!(
        "wrote {} uplink curves to {}",
        study.chosen.curves.len(),
        path.display()
    );
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool, CliError> {
    if args.draws < MIN_VALIDATION_DRAWS {
        return Err(CliError::Config(format!(
            "--draws must be at least {MIN_VALIDATION_DRAWS}"
        )));
    }
    if args.cases == 0 {
        return Err(CliError::Config("--cases must be positive".into()));
    }
    let cases = validation_cases(args.cases, args.seed, !args.no_interference);
    let mut results: Vec<ValidationResult> = Vec::with_capacity(cases.len());
    println!("case,interferers,hopping,beta,closed_form,estimate,stderr,result");
    for (k, case) in cases.iter().enumerate() {
        let r = validate_case(
            case,
            args.draws,
            args.seed.wrapping_add(k as u64 + 1),
            execution(),
        )?;
        println!(
            "{k},{},{},{},{:e},{:e},{:e},{}",
            case.profile.interferer_count(),
            case.hopping,
            case.beta,
            r.closed_form,
            r.estimate.outage,
            r.estimate.stderr,
            if r.pass { "pass" } else { "FAIL" }
        );
        results.push(r);
    }
    let misses = results.iter().filter(|r| !r.pass).count();
    let allowed = miss_allowance(args.cases);
    println!(
        "# {misses} of {} cases outside 4 stderr; {allowed} allowed",
        args.cases
    );
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        output::write_validation(dir, args.format, &cases, &results)?;
    }
    Ok(misses <= allowed)
}

fn cmd_gen_topology(args: &GenTopologyArgs) -> Result<(), CliError> {
    if args.stations == 0 {
        return Err(CliError::Config("--stations must be at least 1".into()));
    }
    let region = Rect::sized(args.region, args.region)?;
    let stations = synthetic_stations(args.stations, region, args.jitter, args.seed)?;
    match &args.out {
        Some(p) => NetworkTopology::write_stations(&stations, fs::File::create(p)?)?,
        None => NetworkTopology::write_stations(&stations, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Sweep(a) => cmd_sweep(a).map(|()| true),
        Command::Validate(a) => cmd_validate(a),
        Command::RateCurve(a) => cmd_rate_curve(a).map(|()| true),
        Command::GenTopology(a) => cmd_gen_topology(a).map(|()| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
