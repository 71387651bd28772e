//! Spectral engine: pump spectra, filter transmissions, fiber phase matching
//! and the discretized joint spectral amplitude of the filtered pair.

mod fiber;
mod filter;
mod grid;
mod jsa;
mod pump;

pub use fiber::{phase_mismatch, FiberSpec};
pub use filter::{filter_transmission, FilterShape, FilterSpec};
pub use grid::FrequencyGrid;
pub use jsa::{build_jsa, grid_for_measured_band, grid_for_pair, open_conjugate_filter, JsaMatrix};
pub use pump::{build_pump_spectrum, PulseShape, PumpSpec, SpectralAmplitude};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid spans {covered:.4} rad/ps but must cover at least 4 pump FWHM ({needed:.4})")]
    GridTooNarrow { covered: f64, needed: f64 },
    #[error("JSA norm {norm:.3e} below 1e-30; filters do not overlap the generated band")]
    NormalizationFailure { norm: f64 },
    #[error("n_points must be a power of two >= 16, got {0}")]
    BadGridSize(usize),
    #[error("span must be positive, got {0}")]
    BadSpan(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("pump average/peak power inconsistent: stated {stated:.4} mW, duty-derived {derived:.4} mW")]
    PowerInconsistent { stated: f64, derived: f64 },
}
