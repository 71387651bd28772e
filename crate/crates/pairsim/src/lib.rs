//! Desk-scale simulator for a pulsed fiber photon-pair source.
//!
//! Models spontaneous four-wave mixing in dispersion-shifted fiber with a
//! Raman background and gated single-photon detection, and reproduces the
//! standard bench measurements on such a source: photon-number power
//! scaling, accidental-coincidence scaling, the second-order coherence g2 of
//! one band versus filter bandwidth, and two-source Hong-Ou-Mandel
//! interference.
//!
//! Pipeline: [`spectral`] builds the joint spectral amplitude, [`modes`]
//! Schmidt-decomposes it into the coherence observables, [`sampler`] turns
//! the mode structure into per-gate photon numbers and detector clicks,
//! [`counting`] and [`hom`] reduce click streams to rates, g2 and dip
//! visibilities, and [`scenario`] orchestrates full experiments from a
//! [`config::ExperimentConfig`].

pub mod config;
pub mod constants;
pub mod counting;
pub mod hom;
pub mod modes;
pub mod rng;
pub mod sampler;
pub mod scenario;
pub mod spectral;
pub mod table;

pub use config::ExperimentConfig;
pub use modes::{
    effective_mode_number, predict_g2, predict_hom_visibility, schmidt_decompose,
    CoherencePrediction, SchmidtSpectrum,
};
pub use spectral::{build_jsa, FiberSpec, FilterSpec, FrequencyGrid, JsaMatrix, PumpSpec};
