//! Scenario orchestration: each CLI subcommand maps onto one bench
//! experiment, emitting CSV tables, a plain-text report and a run manifest.

mod coherence;
mod hom_scan;
mod sweeps;

pub use sweeps::quartic_share_at;

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{print_config, ConfigError, ExperimentConfig, Scenario};
use crate::counting::{CountingError, FitError};
use crate::hom::HomError;
use crate::modes::ModesError;
use crate::sampler::SamplerError;
use crate::spectral::SpectralError;
use crate::table::{emit_csv, emit_text, Table, TableError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("no scenario selected (set `scenario` in the config or use a subcommand)")]
    MissingScenario,
    #[error("{scenario}: {source}")]
    Spectral {
        scenario: Scenario,
        #[source]
        source: SpectralError,
    },
    #[error("{scenario}: {source}")]
    Modes {
        scenario: Scenario,
        #[source]
        source: ModesError,
    },
    #[error("{scenario}: {source}")]
    Sampler {
        scenario: Scenario,
        #[source]
        source: SamplerError,
    },
    #[error("{scenario}: {source}")]
    Counting {
        scenario: Scenario,
        #[source]
        source: CountingError,
    },
    #[error("{scenario}: {source}")]
    Fit {
        scenario: Scenario,
        #[source]
        source: FitError,
    },
    #[error("{scenario}: {source}")]
    Hom {
        scenario: Scenario,
        #[source]
        source: HomError,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("serializing manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// Digest record of one emitted file.
#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Written next to the outputs of every run; the same (config, seed) pair
/// reproduces every CSV byte for byte (the manifest itself carries the
/// wall-clock duration and therefore varies).
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub scenario: String,
    pub master_seed: u64,
    pub duration_ms: u128,
    pub outputs: Vec<OutputFile>,
    pub config_toml: String,
}

/// Execute the configured scenario, emitting its files under
/// `cfg.output_dir`.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<RunManifest, RunError> {
    cfg.validate()?;
    let scenario = cfg.scenario.ok_or(RunError::MissingScenario)?;
    let started = Instant::now();
    let mut sink = OutputSink::new(cfg.output_dir.clone());
    match scenario {
        Scenario::PowerSweep => sweeps::power_sweep(cfg, &mut sink)?,
        Scenario::AccidentalSweep => sweeps::accidental_sweep(cfg, &mut sink)?,
        Scenario::G2VsBandwidth => coherence::g2_vs_bandwidth(cfg, &mut sink)?,
        Scenario::SingleG2 => coherence::single_g2(cfg, &mut sink)?,
        Scenario::HomScan => hom_scan::hom_scan(cfg, &mut sink)?,
    }
    let manifest = RunManifest {
        artifact: "pairsim".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.to_string(),
        master_seed: cfg.master_seed,
        duration_ms: started.elapsed().as_millis(),
        outputs: sink.outputs,
        config_toml: print_config(cfg)?,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    emit_text(&json, &cfg.output_dir.join("run_manifest.json"))?;
    Ok(manifest)
}

/// Collects emitted files and their digests.
pub(crate) struct OutputSink {
    dir: PathBuf,
    outputs: Vec<OutputFile>,
}

impl OutputSink {
    fn new(dir: PathBuf) -> Self {
        OutputSink {
            dir,
            outputs: Vec::new(),
        }
    }

    pub(crate) fn csv(&mut self, name: &str, table: &Table) -> Result<(), TableError> {
        let text = table.to_csv();
        emit_csv(table, &self.dir.join(name))?;
        self.record(name, text.as_bytes());
        Ok(())
    }

    pub(crate) fn text(&mut self, name: &str, body: &str) -> Result<(), TableError> {
        emit_text(body, &self.dir.join(name))?;
        self.record(name, body.as_bytes());
        Ok(())
    }

    fn record(&mut self, name: &str, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputFile {
            name: name.to_string(),
            sha256: hex,
            bytes: bytes.len() as u64,
        });
    }
}

pub(crate) fn ctx_modes(s: Scenario) -> impl Fn(ModesError) -> RunError {
    move |source| RunError::Modes {
        scenario: s,
        source,
    }
}

pub(crate) fn ctx_sampler(s: Scenario) -> impl Fn(SamplerError) -> RunError {
    move |source| RunError::Sampler {
        scenario: s,
        source,
    }
}

pub(crate) fn ctx_counting(s: Scenario) -> impl Fn(CountingError) -> RunError {
    move |source| RunError::Counting {
        scenario: s,
        source,
    }
}

pub(crate) fn ctx_fit(s: Scenario) -> impl Fn(FitError) -> RunError {
    move |source| RunError::Fit {
        scenario: s,
        source,
    }
}

pub(crate) fn ctx_hom(s: Scenario) -> impl Fn(HomError) -> RunError {
    move |source| RunError::Hom {
        scenario: s,
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use std::path::Path;

    fn tiny_config(dir: &Path, scenario: Scenario) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario = Some(scenario);
        cfg.output_dir = dir.to_path_buf();
        cfg.gates = 300_000;
        cfg.grid.n_points = 64;
        cfg.power_sweep.gates_per_point = 150_000;
        cfg.power_sweep.n_points = 6;
        cfg.accidental_sweep.gates_per_point = 200_000;
        cfg.accidental_sweep.n_points = 6;
        cfg.accidental_sweep.max_power_mw = 2.0;
        cfg.g2_sweep.gates_per_ratio = 150_000;
        cfg.g2_sweep.ratios = vec![0.5, 2.0];
        cfg.hom.gates_per_point = 120_000;
        cfg.hom.n_delays = 9;
        cfg.hom.power_mw = 3.0;
        cfg.single_g2.power_mw = 3.3;
        cfg
    }

    #[test]
    fn missing_scenario_is_an_error() {
        let cfg = ExperimentConfig::default();
        assert!(matches!(
            run_scenario(&cfg),
            Err(RunError::MissingScenario)
        ));
    }

    #[test]
    fn every_scenario_runs_and_writes_a_manifest() {
        for scenario in [
            Scenario::SingleG2,
            Scenario::PowerSweep,
            Scenario::AccidentalSweep,
            Scenario::G2VsBandwidth,
            Scenario::HomScan,
        ] {
            let dir = tempfile::tempdir().unwrap();
            let cfg = tiny_config(dir.path(), scenario);
            let manifest = run_scenario(&cfg).unwrap_or_else(|e| panic!("{scenario}: {e}"));
            assert!(!manifest.outputs.is_empty(), "{scenario} wrote nothing");
            assert!(dir.path().join("run_manifest.json").exists());
            for out in &manifest.outputs {
                assert!(dir.path().join(&out.name).exists(), "{} missing", out.name);
            }
        }
    }

    #[test]
    fn identical_seed_reproduces_identical_bytes() {
        let run = |seed: u64, dir: &Path| {
            let mut cfg = tiny_config(dir, Scenario::SingleG2);
            cfg.master_seed = seed;
            run_scenario(&cfg).unwrap();
            std::fs::read(dir.join("single_g2.csv")).unwrap()
        };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let d3 = tempfile::tempdir().unwrap();
        let a = run(7, d1.path());
        let b = run(7, d2.path());
        let c = run(8, d3.path());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
