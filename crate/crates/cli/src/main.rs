//! `geospin`: config-driven mission simulation pipeline.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numeric
//! domain error.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artifacts::ArtifactSet;
use config::PipelineConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Numeric(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "geospin",
    about = "Orbital pseudomagnetic-field simulation and sensitivity forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true, default_value = "config/mission.toml")]
    config: PathBuf,
    /// Output directory override (also honored: GEOSPIN_OUT env var).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads; results are identical at any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the exotic field along the orbit and write the time series.
    SimulateField,
    /// Run the comagnetometer forward model and field extraction.
    SimulateSensor,
    /// Amplitude spectrum of the simulated series.
    Spectrum,
    /// Overlapping Allan deviation of the simulated series.
    Allan,
    /// Coupling exclusion forecast over the configured range grid.
    Exclusion,
    /// Equivalent-field noise budget.
    Budget,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("GEOSPIN_OUT").map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone());
    cfg.output.dir = out_dir.clone();

    let mut artifacts = ArtifactSet::new(&out_dir)?;
    let result = dispatch(&cli.command, &cfg, &mut artifacts);
    match result {
        Ok(()) => {
            artifacts.write("resolved_config.toml", &cfg.to_resolved_toml()?)?;
            artifacts.finish()
        }
        Err(e) => {
            artifacts.discard();
            Err(e)
        }
    }
}

fn dispatch(
    command: &Command,
    cfg: &PipelineConfig,
    artifacts: &mut ArtifactSet,
) -> Result<(), CliError> {
    match command {
        Command::SimulateField => commands::simulate_field(cfg, artifacts),
        Command::SimulateSensor => commands::simulate_sensor(cfg, artifacts),
        Command::Spectrum => commands::spectrum(cfg, artifacts),
        Command::Allan => commands::allan(cfg, artifacts),
        Command::Exclusion => commands::exclusion(cfg, artifacts),
        Command::Budget => commands::budget(cfg, artifacts),
    }
}
