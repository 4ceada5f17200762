//! Command-line front end: joint spectral grids, phase-matching loci,
//! predicted and reduced count rates, QPM period design, and pump
//! isolation scans for photon-pair generation in QPM waveguides.

mod commands;
mod config;
mod error;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use error::CliError;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  2  configuration or usage error (bad flag, bad config key or value)
  3  data or model error (dispersion files, measured rows, computations)
  4  filesystem error

All artifact files are byte-stable: identical config and inputs produce
identical bytes, independent of --threads.";

#[derive(Parser)]
#[command(
    name = "wgspdc",
    version,
    about = "Photon-pair simulator for multimode quasi-phase-matched waveguides",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a config value, e.g. --set pump.fwhm_nm=4.0 (repeatable;
    /// wins over the file).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Worker threads for grid evaluation (0 = rayon default). Output
    /// bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Override output.dir from the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-triplet JSA/JSI grids and the incoherent total JSI.
    Jsa,
    /// Phase-matching (Δk = 0) curves per triplet.
    Locus,
    /// Predicted singles/trigger/coincidence rates through the filter chain.
    Rates,
    /// Reduce a measured-rates CSV (accidental correction + Poisson errors).
    Reduce {
        /// Measured rows: header lambda_nm,Rs_hz,Rt_hz,Rc_hz.
        #[arg(long, value_name = "FILE")]
        rows: PathBuf,
    },
    /// QPM period that phase-matches the configured design target.
    DesignPeriod,
    /// Pump center/bandwidth isolation scan.
    Scan,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;

    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::config("--config <FILE> is required"))?;
    let (config, config_dir) = config::load_config(config_path, &cli.set)?;

    let ctx = Context {
        config: &config,
        config_dir: &config_dir,
        out_dir: cli.out.clone().unwrap_or_else(|| config.output.dir.clone()),
        format: config.output_format()?,
    };

    match &cli.command {
        Command::Jsa => commands::run_jsa(&ctx),
        Command::Locus => commands::run_locus(&ctx),
        Command::Rates => commands::run_rates(&ctx),
        Command::Reduce { rows } => commands::run_reduce(&ctx, rows),
        Command::DesignPeriod => commands::run_design_period(&ctx),
        Command::Scan => commands::run_scan(&ctx),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: usize) -> Result<(), CliError> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: usize) -> Result<(), CliError> {
    // Sequential build: the flag is accepted and ignored.
    Ok(())
}
