//! Dispersion-shifted fiber model and phase mismatch.
//!
//! The propagation constant is expanded to third order about the
//! zero-dispersion frequency w0, with beta2(w0) = 0 and beta3 fixed by the
//! dispersion slope D':
//!
//! ```text
//! beta3 = lam0^4 D' / (4 pi^2 c^2)        [ps^3/km]
//! dk    = beta(ws) + beta(wi) - 2 beta(wp) + 2 gamma P     [rad/km]
//! ```
//!
//! The constant and linear expansion terms cancel in `dk` whenever
//! `ws + wi = 2 wp`, so only the cubic term survives.

use serde::{Deserialize, Serialize};

use crate::constants::{omega_of_wavelength, C_NM_PER_PS};

/// Dispersion-shifted fiber parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    /// Length, km.
    pub length_km: f64,
    /// Zero-dispersion wavelength, nm.
    pub zero_dispersion_nm: f64,
    /// Dispersion slope at lam0, ps/(nm^2 km).
    pub dispersion_slope: f64,
    /// Nonlinear coefficient gamma, 1/(W km).
    pub nonlinear_coefficient: f64,
}

impl FiberSpec {
    /// Third-order dispersion at the zero-dispersion frequency, ps^3/km.
    pub fn beta3(&self) -> f64 {
        let lam0 = self.zero_dispersion_nm;
        lam0.powi(4) * self.dispersion_slope
            / (4.0 * std::f64::consts::PI.powi(2) * C_NM_PER_PS.powi(2))
    }

    /// Zero-dispersion angular frequency, rad/ps.
    pub fn omega_zero(&self) -> f64 {
        omega_of_wavelength(self.zero_dispersion_nm)
    }

    /// Cubic beta expansion about w0 (beta0 and beta1 omitted; they cancel
    /// in every phase-mismatch combination used here).
    fn beta_cubic(&self, omega: f64) -> f64 {
        let d = omega - self.omega_zero();
        self.beta3() / 6.0 * d * d * d
    }
}

/// Phase mismatch dk (rad/km) for signal/idler at `omega_s`, `omega_i` with
/// the pump at `pump_center` (callers pass (ws + wi)/2 under energy
/// conservation) and nonlinear phase 2 gamma P from `peak_power_w`.
pub fn phase_mismatch(
    omega_s: f64,
    omega_i: f64,
    fiber: &FiberSpec,
    pump_center: f64,
    peak_power_w: f64,
) -> f64 {
    fiber.beta_cubic(omega_s) + fiber.beta_cubic(omega_i) - 2.0 * fiber.beta_cubic(pump_center)
        + 2.0 * fiber.nonlinear_coefficient * peak_power_w
}
