//! Command-line entry point.
//!
//! `pairsim <scenario> [--config path] [--seed u64] [--gates n] [--out dir]`
//! with flag > file > default precedence; `PAIRSIM_WORKERS` caps the worker
//! pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pairsim::config::{parse_config, ExperimentConfig, Scenario};
use pairsim::scenario::run_scenario;

#[derive(Parser, Debug)]
#[command(
    name = "pairsim",
    version,
    about = "Pulsed fiber photon-pair source simulator"
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    scenario: Scenario,
    /// TOML configuration file; defaults describe the reference apparatus.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Gate-count override for single-run scenarios.
    #[arg(long)]
    gates: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Ok(workers) = std::env::var("PAIRSIM_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size worker pool: {e}");
                }
            }
            _ => log::warn!("ignoring invalid PAIRSIM_WORKERS={workers}"),
        }
    }

    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match parse_config(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            },
            Err(e) => {
                eprintln!("error: reading {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        },
        None => ExperimentConfig::default(),
    };

    cfg.scenario = Some(cli.scenario);
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(gates) = cli.gates {
        cfg.gates = gates;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }

    match run_scenario(&cfg) {
        Ok(manifest) => {
            println!(
                "{}: {} output file(s) in {} ({} ms)",
                manifest.scenario,
                manifest.outputs.len(),
                cfg.output_dir.display(),
                manifest.duration_ms
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
