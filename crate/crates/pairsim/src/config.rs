//! Experiment configuration: TOML parsing, validated defaults matching the
//! bench apparatus, round-trippable printing.
//!
//! Precedence is flag > file > default; the CLI applies flag overrides after
//! [`parse_config`].

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::{CalibCoefficients, DetectorSpec};
use crate::spectral::{FiberSpec, FilterSpec, FilterShape, PulseShape, PumpSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration:\n{}", issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid { issues: Vec<String> },
    #[error("config serialization error: {0}")]
    Print(#[from] toml::ser::Error),
}

/// Which bench experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Scenario {
    PowerSweep,
    AccidentalSweep,
    G2VsBandwidth,
    HomScan,
    SingleG2,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scenario::PowerSweep => "power_sweep",
            Scenario::AccidentalSweep => "accidental_sweep",
            Scenario::G2VsBandwidth => "g2_vs_bandwidth",
            Scenario::HomScan => "hom_scan",
            Scenario::SingleG2 => "single_g2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpBlock {
    pub center_wavelength_nm: f64,
    pub fwhm_nm: f64,
    pub pulse_shape: PulseShape,
    pub peak_power_w: Option<f64>,
    pub average_power_mw: f64,
    pub repetition_rate_mhz: f64,
}

impl Default for PumpBlock {
    fn default() -> Self {
        PumpBlock {
            center_wavelength_nm: 1538.9,
            fwhm_nm: 0.9,
            pulse_shape: PulseShape::Gaussian,
            peak_power_w: None,
            average_power_mw: 0.25,
            repetition_rate_mhz: 40.0,
        }
    }
}

impl PumpBlock {
    pub fn to_spec(&self) -> PumpSpec {
        PumpSpec {
            center_wavelength_nm: self.center_wavelength_nm,
            fwhm_nm: self.fwhm_nm,
            pulse_shape: self.pulse_shape,
            peak_power_w: self.peak_power_w,
            average_power_mw: self.average_power_mw,
            repetition_rate_mhz: self.repetition_rate_mhz,
        }
    }

    pub fn at_power(&self, average_power_mw: f64) -> PumpSpec {
        PumpSpec {
            average_power_mw,
            peak_power_w: None,
            ..self.to_spec()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberBlock {
    pub length_km: f64,
    pub zero_dispersion_nm: f64,
    /// Dispersion slope, ps/(nm^2 km); representative DSF value, not a
    /// measured one.
    pub dispersion_slope: f64,
    /// Nonlinear coefficient, 1/(W km); representative DSF value.
    pub nonlinear_coefficient: f64,
}

impl Default for FiberBlock {
    fn default() -> Self {
        FiberBlock {
            length_km: 0.3,
            zero_dispersion_nm: 1538.0,
            dispersion_slope: 0.075,
            nonlinear_coefficient: 2.0,
        }
    }
}

impl FiberBlock {
    pub fn to_spec(&self) -> FiberSpec {
        FiberSpec {
            length_km: self.length_km,
            zero_dispersion_nm: self.zero_dispersion_nm,
            dispersion_slope: self.dispersion_slope,
            nonlinear_coefficient: self.nonlinear_coefficient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterBlock {
    pub signal_center_nm: f64,
    pub signal_fwhm_nm: f64,
    pub idler_center_nm: f64,
    pub idler_fwhm_nm: f64,
    /// "gaussian" or a super-Gaussian order >= 1.
    pub supergaussian_order: u32,
}

impl Default for FilterBlock {
    fn default() -> Self {
        FilterBlock {
            signal_center_nm: 1546.9,
            signal_fwhm_nm: 0.33,
            idler_center_nm: 1530.9,
            idler_fwhm_nm: 0.33,
            supergaussian_order: 1,
        }
    }
}

impl FilterBlock {
    fn shape(&self) -> FilterShape {
        if self.supergaussian_order <= 1 {
            FilterShape::Gaussian
        } else {
            FilterShape::SuperGaussian {
                order: self.supergaussian_order,
            }
        }
    }

    pub fn signal_spec(&self) -> FilterSpec {
        FilterSpec {
            center_wavelength_nm: self.signal_center_nm,
            fwhm_nm: self.signal_fwhm_nm,
            shape: self.shape(),
        }
    }

    pub fn signal_spec_with_fwhm(&self, fwhm_nm: f64) -> FilterSpec {
        FilterSpec {
            fwhm_nm,
            ..self.signal_spec()
        }
    }

    pub fn idler_spec(&self) -> FilterSpec {
        FilterSpec {
            center_wavelength_nm: self.idler_center_nm,
            fwhm_nm: self.idler_fwhm_nm,
            shape: self.shape(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorBlock {
    /// Quantum efficiency; calibration knob, not a measured apparatus value.
    pub efficiency: f64,
    /// Dark-count probability per gate; calibration knob.
    pub dark_count_prob: f64,
    pub gate_width_ns: f64,
    pub gate_rate_khz: f64,
    pub dead_time_us: f64,
    pub channel_loss_db: f64,
}

impl Default for DetectorBlock {
    fn default() -> Self {
        DetectorBlock {
            efficiency: 0.10,
            dark_count_prob: 1e-4,
            gate_width_ns: 2.5,
            gate_rate_khz: 625.0,
            dead_time_us: 10.0,
            channel_loss_db: 0.0,
        }
    }
}

impl DetectorBlock {
    pub fn to_spec(&self) -> DetectorSpec {
        DetectorSpec {
            efficiency: self.efficiency,
            dark_count_prob: self.dark_count_prob,
            gate_width_ns: self.gate_width_ns,
            gate_rate_khz: self.gate_rate_khz,
            dead_time_us: self.dead_time_us,
            channel_loss_db: self.channel_loss_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceBlock {
    /// Raman yield: mean photons per pulse per mW (synthetic calibration).
    pub linear_coeff_per_mw: f64,
    /// FWM yield: mean pairs per pulse per mW^2 (synthetic calibration).
    pub quad_coeff_per_mw2: f64,
    pub raman_mode_count: u32,
}

impl Default for SourceBlock {
    fn default() -> Self {
        SourceBlock {
            linear_coeff_per_mw: 0.002,
            quad_coeff_per_mw2: 0.1,
            raman_mode_count: 10,
        }
    }
}

impl SourceBlock {
    pub fn calib(&self) -> CalibCoefficients {
        CalibCoefficients {
            linear_per_mw: self.linear_coeff_per_mw,
            quad_per_mw2: self.quad_coeff_per_mw2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub n_points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock { n_points: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerSweepBlock {
    pub min_power_mw: f64,
    pub max_power_mw: f64,
    pub n_points: usize,
    pub gates_per_point: u64,
}

impl Default for PowerSweepBlock {
    fn default() -> Self {
        PowerSweepBlock {
            min_power_mw: 0.05,
            max_power_mw: 0.5,
            n_points: 10,
            gates_per_point: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AccidentalSweepBlock {
    pub min_power_mw: f64,
    pub max_power_mw: f64,
    pub n_points: usize,
    pub gates_per_point: u64,
}

impl Default for AccidentalSweepBlock {
    fn default() -> Self {
        AccidentalSweepBlock {
            min_power_mw: 0.2,
            max_power_mw: 1.0,
            n_points: 9,
            gates_per_point: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G2SweepBlock {
    /// Signal-filter to pump bandwidth ratios.
    pub ratios: Vec<f64>,
    /// Average power for the Monte-Carlo estimates, mW.
    pub power_mw: f64,
    pub gates_per_ratio: u64,
}

impl Default for G2SweepBlock {
    fn default() -> Self {
        G2SweepBlock {
            ratios: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            power_mw: 1.6,
            gates_per_ratio: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SingleG2Block {
    /// Operating power of the headline g2 measurement, mW; chosen for
    /// counting statistics at 1e7 gates.
    pub power_mw: f64,
    /// Optionally dump the two click streams as CSV.
    pub export_clicks: bool,
}

impl Default for SingleG2Block {
    fn default() -> Self {
        SingleG2Block {
            power_mw: 3.3,
            export_clicks: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomBlock {
    /// Per-source average power, mW.
    pub power_mw: f64,
    /// Signal-filter FWHM for both sources, nm.
    pub signal_fwhm_nm: f64,
    pub delay_min_ps: f64,
    pub delay_max_ps: f64,
    pub n_delays: usize,
    pub gates_per_point: u64,
    /// Stage positions instead of delays: delay = 2 * position / c.
    pub stage_units_mm: bool,
    /// Scalar mode-basis overlap multiplier on the ideal visibility.
    pub mode_basis_overlap: f64,
    /// Intensity ratio source2/source1.
    pub source_imbalance: f64,
}

impl Default for HomBlock {
    fn default() -> Self {
        HomBlock {
            power_mw: 2.2,
            signal_fwhm_nm: 0.33,
            delay_min_ps: -30.0,
            delay_max_ps: 30.0,
            n_delays: 21,
            gates_per_point: 40_000_000,
            stage_units_mm: false,
            mode_basis_overlap: 1.0,
            source_imbalance: 1.0,
        }
    }
}

impl HomBlock {
    /// Scan delays in ps (converting double-pass stage millimeters when
    /// selected).
    pub fn delays_ps(&self) -> Vec<f64> {
        let scale = if self.stage_units_mm {
            // delay = 2 * position / c, c = 0.299792458 mm/ps
            2.0 / (crate::constants::C_NM_PER_PS * 1e-6)
        } else {
            1.0
        };
        (0..self.n_delays)
            .map(|i| {
                let t = self.delay_min_ps
                    + (self.delay_max_ps - self.delay_min_ps) * i as f64
                        / (self.n_delays - 1).max(1) as f64;
                t * scale
            })
            .collect()
    }
}

/// Full experiment description; every field has an apparatus default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: Option<Scenario>,
    pub master_seed: u64,
    /// Gates for single-run scenarios (single_g2).
    pub gates: u64,
    pub output_dir: PathBuf,
    pub pump: PumpBlock,
    pub fiber: FiberBlock,
    pub filters: FilterBlock,
    pub detector: DetectorBlock,
    pub source: SourceBlock,
    pub grid: GridBlock,
    pub power_sweep: PowerSweepBlock,
    pub accidental_sweep: AccidentalSweepBlock,
    pub g2_sweep: G2SweepBlock,
    pub single_g2: SingleG2Block,
    pub hom: HomBlock,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: None,
            master_seed: 42,
            gates: 10_000_000,
            output_dir: PathBuf::from("pairsim-out"),
            pump: PumpBlock::default(),
            fiber: FiberBlock::default(),
            filters: FilterBlock::default(),
            detector: DetectorBlock::default(),
            source: SourceBlock::default(),
            grid: GridBlock::default(),
            power_sweep: PowerSweepBlock::default(),
            accidental_sweep: AccidentalSweepBlock::default(),
            g2_sweep: G2SweepBlock::default(),
            single_g2: SingleG2Block::default(),
            hom: HomBlock::default(),
        }
    }
}

impl ExperimentConfig {
    /// Validate physical ranges; collects every violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut issues = Vec::new();
        let mut wavelength = |key: &str, v: f64| {
            if !(1400.0..=1700.0).contains(&v) {
                issues.push(format!("{key} = {v} nm outside [1400, 1700]"));
            }
        };
        wavelength("pump.center_wavelength_nm", self.pump.center_wavelength_nm);
        wavelength("filters.signal_center_nm", self.filters.signal_center_nm);
        wavelength("filters.idler_center_nm", self.filters.idler_center_nm);
        wavelength("fiber.zero_dispersion_nm", self.fiber.zero_dispersion_nm);

        let mut power = |key: &str, v: f64| {
            if !(0.0..=100.0).contains(&v) {
                issues.push(format!("{key} = {v} mW outside [0, 100]"));
            }
        };
        power("pump.average_power_mw", self.pump.average_power_mw);
        power("power_sweep.min_power_mw", self.power_sweep.min_power_mw);
        power("power_sweep.max_power_mw", self.power_sweep.max_power_mw);
        power(
            "accidental_sweep.min_power_mw",
            self.accidental_sweep.min_power_mw,
        );
        power(
            "accidental_sweep.max_power_mw",
            self.accidental_sweep.max_power_mw,
        );
        power("g2_sweep.power_mw", self.g2_sweep.power_mw);
        power("single_g2.power_mw", self.single_g2.power_mw);
        power("hom.power_mw", self.hom.power_mw);

        let mut positive = |key: &str, v: f64| {
            if !(v > 0.0) {
                issues.push(format!("{key} = {v} must be positive"));
            }
        };
        positive("pump.fwhm_nm", self.pump.fwhm_nm);
        positive("pump.repetition_rate_mhz", self.pump.repetition_rate_mhz);
        positive("filters.signal_fwhm_nm", self.filters.signal_fwhm_nm);
        positive("filters.idler_fwhm_nm", self.filters.idler_fwhm_nm);
        positive("fiber.length_km", self.fiber.length_km);
        positive("detector.gate_rate_khz", self.detector.gate_rate_khz);
        positive("hom.mode_basis_overlap", self.hom.mode_basis_overlap);

        if !(0.0..=1.0).contains(&self.detector.efficiency) {
            issues.push(format!(
                "detector.efficiency = {} outside [0, 1]",
                self.detector.efficiency
            ));
        }
        if !(0.0..1.0).contains(&self.detector.dark_count_prob) {
            issues.push(format!(
                "detector.dark_count_prob = {} outside [0, 1)",
                self.detector.dark_count_prob
            ));
        }
        if self.detector.dead_time_us < 0.0 {
            issues.push("detector.dead_time_us must be >= 0".to_string());
        }
        if self.detector.channel_loss_db < 0.0 {
            issues.push("detector.channel_loss_db must be >= 0".to_string());
        }
        if self.source.linear_coeff_per_mw < 0.0 || self.source.quad_coeff_per_mw2 < 0.0 {
            issues.push("source calibration coefficients must be >= 0".to_string());
        }
        if self.source.raman_mode_count == 0 {
            issues.push("source.raman_mode_count must be >= 1".to_string());
        }
        if self.grid.n_points < 16 || !self.grid.n_points.is_power_of_two() {
            issues.push(format!(
                "grid.n_points = {} must be a power of two >= 16",
                self.grid.n_points
            ));
        }
        if self.gates == 0 {
            issues.push("gates must be >= 1".to_string());
        }
        if self.g2_sweep.ratios.iter().any(|&r| r <= 0.0) {
            issues.push("g2_sweep.ratios must be positive".to_string());
        }
        if self.hom.n_delays < 7 {
            issues.push(format!(
                "hom.n_delays = {} must be >= 7 for visibility extraction",
                self.hom.n_delays
            ));
        }
        if self.hom.gates_per_point < 10_000 {
            issues.push(format!(
                "hom.gates_per_point = {} must be >= 10000",
                self.hom.gates_per_point
            ));
        }
        if !(0.0..=1.0).contains(&self.hom.mode_basis_overlap) {
            issues.push(format!(
                "hom.mode_basis_overlap = {} outside [0, 1]",
                self.hom.mode_basis_overlap
            ));
        }
        if self.hom.source_imbalance <= 0.0 {
            issues.push("hom.source_imbalance must be positive".to_string());
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { issues })
        }
    }
}

/// Parse and validate a TOML config document; the empty document yields the
/// apparatus defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serialize a config so that `parse_config(print_config(c)) == c`.
pub fn print_config(cfg: &ExperimentConfig) -> Result<String, ConfigError> {
    Ok(toml::to_string_pretty(cfg)?)
}
