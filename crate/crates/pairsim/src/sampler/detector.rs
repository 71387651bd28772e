//! Gated Geiger-mode single-photon detector model.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// InGaAs SPD operated in gated Geiger mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    /// Quantum efficiency within the gate.
    pub efficiency: f64,
    /// Dark-count probability per gate.
    pub dark_count_prob: f64,
    /// Gate width, ns.
    pub gate_width_ns: f64,
    /// Gate repetition rate, kHz (1/64 of the pump repetition rate).
    pub gate_rate_khz: f64,
    /// Dead time after a click, us.
    pub dead_time_us: f64,
    /// Collection/filter insertion loss ahead of the detector, dB.
    pub channel_loss_db: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        DetectorSpec {
            efficiency: 0.10,
            dark_count_prob: 1e-4,
            gate_width_ns: 2.5,
            gate_rate_khz: 625.0,
            dead_time_us: 10.0,
            channel_loss_db: 0.0,
        }
    }
}

impl DetectorSpec {
    /// Efficiency folded with the channel loss.
    pub fn eta_total(&self) -> f64 {
        self.efficiency * 10f64.powf(-self.channel_loss_db / 10.0)
    }

    /// Dead time expressed as a whole number of skipped gates.
    pub fn dead_gates(&self) -> u32 {
        (self.dead_time_us * self.gate_rate_khz * 1e-3).ceil() as u32
    }
}

/// Click outcome for `n_photons` arriving within one gate.
///
/// Click probability `1 - (1 - p_dark) (1 - eta_total)^n`.
#[inline]
pub fn detect(n_photons: u32, det: &DetectorSpec, rng: &mut impl Rng) -> bool {
    let miss = (1.0 - det.dark_count_prob) * (1.0 - det.eta_total()).powi(n_photons as i32);
    rng.random::<f64>() >= miss
}
