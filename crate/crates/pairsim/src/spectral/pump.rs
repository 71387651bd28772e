//! Pump pulse spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::domega_of_dlambda;

use super::SpectralError;

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    Gaussian,
}

/// Pump pulse train parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    /// Center wavelength, nm.
    pub center_wavelength_nm: f64,
    /// Intensity FWHM of the carved spectrum, nm.
    pub fwhm_nm: f64,
    pub pulse_shape: PulseShape,
    /// Peak power, W. Defaults from average power and the transform-limited
    /// duty factor when absent.
    pub peak_power_w: Option<f64>,
    /// Average power, mW.
    pub average_power_mw: f64,
    /// Repetition rate, MHz.
    pub repetition_rate_mhz: f64,
}

impl PumpSpec {
    /// Intensity FWHM in rad/ps.
    pub fn fwhm_omega(&self) -> f64 {
        domega_of_dlambda(self.fwhm_nm, self.center_wavelength_nm)
    }

    /// Transform-limited Gaussian intensity-FWHM pulse width, ps.
    pub fn pulse_width_ps(&self) -> f64 {
        4.0 * LN2 / self.fwhm_omega()
    }

    /// Duty factor: effective pulse width x repetition rate.
    ///
    /// The effective width of a Gaussian of FWHM dt is dt * sqrt(pi/(4 ln2)).
    pub fn duty_factor(&self) -> f64 {
        let dt_eff = self.pulse_width_ps() * (std::f64::consts::PI / (4.0 * LN2)).sqrt();
        dt_eff * 1e-12 * self.repetition_rate_mhz * 1e6
    }

    /// Peak power in W: stated, or derived from the average power.
    pub fn peak_power(&self) -> f64 {
        self.peak_power_w
            .unwrap_or(self.average_power_mw * 1e-3 / self.duty_factor())
    }

    /// Check invariants. When both peak and average power are set they must
    /// agree through the duty factor within 1%.
    pub fn validate(&self) -> Result<(), SpectralError> {
        if !(self.fwhm_nm > 0.0) {
            return Err(SpectralError::NonPositive {
                name: "pump fwhm_nm",
                value: self.fwhm_nm,
            });
        }
        if let Some(peak) = self.peak_power_w {
            let derived_avg_mw = peak * self.duty_factor() * 1e3;
            let rel = (derived_avg_mw - self.average_power_mw).abs()
                / self.average_power_mw.abs().max(1e-300);
            if rel > 0.01 {
                return Err(SpectralError::PowerInconsistent {
                    stated: self.average_power_mw,
                    derived: derived_avg_mw,
                });
            }
        }
        Ok(())
    }
}

/// Complex spectral amplitude sampled on a frequency axis (rad/ps).
#[derive(Debug, Clone)]
pub struct SpectralAmplitude {
    pub omega: Vec<f64>,
    pub amplitude: Vec<Complex64>,
}

impl SpectralAmplitude {
    /// Discrete L2 norm: sum |A|^2 * dw.
    pub fn norm_sq(&self) -> f64 {
        let dw = self.spacing();
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dw
    }

    pub fn spacing(&self) -> f64 {
        if self.omega.len() > 1 {
            self.omega[1] - self.omega[0]
        } else {
            1.0
        }
    }

    /// Intensity FWHM measured from the samples by linear interpolation of
    /// the half-maximum crossings.
    pub fn measured_intensity_fwhm(&self) -> f64 {
        let ints: Vec<f64> = self.amplitude.iter().map(|a| a.norm_sqr()).collect();
        let peak = ints.iter().cloned().fold(0.0, f64::max);
        let half = peak / 2.0;
        let mut left = None;
        let mut right = None;
        for i in 1..ints.len() {
            if left.is_none() && ints[i - 1] < half && ints[i] >= half {
                let t = (half - ints[i - 1]) / (ints[i] - ints[i - 1]);
                left = Some(self.omega[i - 1] + t * (self.omega[i] - self.omega[i - 1]));
            }
            if ints[i - 1] >= half && ints[i] < half {
                let t = (ints[i - 1] - half) / (ints[i - 1] - ints[i]);
                right = Some(self.omega[i - 1] + t * (self.omega[i] - self.omega[i - 1]));
            }
        }
        match (left, right) {
            (Some(l), Some(r)) => r - l,
            _ => 0.0,
        }
    }
}

/// Gaussian pump amplitude on `axis`, unit L2 norm, intensity FWHM equal to
/// the pump bandwidth converted to angular frequency.
///
/// Fails when the axis covers less than 4 pump FWHM.
pub fn build_pump_spectrum(
    pump: &PumpSpec,
    axis: &[f64],
) -> Result<SpectralAmplitude, SpectralError> {
    let dw_fwhm = pump.fwhm_omega();
    let covered = axis.last().unwrap_or(&0.0) - axis.first().unwrap_or(&0.0);
    if covered < 4.0 * dw_fwhm {
        return Err(SpectralError::GridTooNarrow {
            covered,
            needed: 4.0 * dw_fwhm,
        });
    }
    let w0 = crate::constants::omega_of_wavelength(pump.center_wavelength_nm);
    let amplitude: Vec<Complex64> = match pump.pulse_shape {
        PulseShape::Gaussian => axis
            .iter()
            .map(|&w| {
                let x = (w - w0) / dw_fwhm;
                Complex64::new((-2.0 * LN2 * x * x).exp(), 0.0)
            })
            .collect(),
    };
    let mut s = SpectralAmplitude {
        omega: axis.to_vec(),
        amplitude,
    };
    let n = s.norm_sq().sqrt();
    if n < 1e-150 {
        // degenerate delta-like limit: all mass in the bin nearest w0
        let idx = axis
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - w0)
                    .abs()
                    .partial_cmp(&(b.1 - w0).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let dw = s.spacing();
        s.amplitude.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        s.amplitude[idx] = Complex64::new(1.0 / dw.sqrt(), 0.0);
        return Ok(s);
    }
    s.amplitude.iter_mut().for_each(|a| *a /= n);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::constants::omega_of_wavelength;

    fn paper_pump() -> PumpSpec {
        PumpSpec {
            center_wavelength_nm: 1538.9,
            fwhm_nm: 0.9,
            pulse_shape: PulseShape::Gaussian,
            peak_power_w: None,
            average_power_mw: 0.25,
            repetition_rate_mhz: 40.0,
        }
    }

    fn axis_around(center: f64, span: f64, n: usize) -> Vec<f64> {
        let d = span / (n - 1) as f64;
        (0..n).map(|i| center - span / 2.0 + i as f64 * d).collect()
    }

    #[test]
    fn intensity_fwhm_matches_unit_conversion_oracle() {
        // independent oracle: dw = 2 pi c dlam / lam^2
        let pump = paper_pump();
        let expected = 2.0 * std::f64::consts::PI * 299_792.458 * 0.9 / (1538.9_f64 * 1538.9);
        let w0 = omega_of_wavelength(1538.9);
        let s = build_pump_spectrum(&pump, &axis_around(w0, 8.0 * expected, 2048)).unwrap();
        assert_relative_eq!(s.measured_intensity_fwhm(), expected, max_relative = 1e-4);
        assert_relative_eq!(s.norm_sq(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn narrow_axis_is_rejected() {
        let pump = paper_pump();
        let w0 = omega_of_wavelength(1538.9);
        let err = build_pump_spectrum(&pump, &axis_around(w0, 2.0 * pump.fwhm_omega(), 128));
        assert!(matches!(err, Err(SpectralError::GridTooNarrow { .. })));
    }

    #[test]
    fn delta_limit_is_single_bin_spike() {
        let mut pump = paper_pump();
        pump.fwhm_nm = 1e-12;
        let w0 = omega_of_wavelength(1538.9);
        let s = build_pump_spectrum(&pump, &axis_around(w0, 1.0, 64)).unwrap();
        let nonzero: Vec<_> = s.amplitude.iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_relative_eq!(s.norm_sq(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_grid_gives_even_amplitude() {
        let pump = paper_pump();
        let w0 = omega_of_wavelength(1538.9);
        let n = 257; // odd: w0 lands exactly on the middle sample
        let s = build_pump_spectrum(&pump, &axis_around(w0, 6.0, n)).unwrap();
        for i in 0..n {
            let d = (s.amplitude[i] - s.amplitude[n - 1 - i]).norm();
            assert!(d < 1e-12, "asymmetry {d} at {i}");
        }
    }

    #[test]
    fn pulse_width_is_about_4ps_at_paper_bandwidth() {
        // 0.9 nm at 1538.9 nm is a ~3.9 ps transform-limited pulse
        let w = paper_pump().pulse_width_ps();
        assert!((3.5..4.5).contains(&w), "pulse width {w}");
    }

    #[test]
    fn power_consistency_check() {
        let mut p = paper_pump();
        // duty factor ~1.65e-4; 0.25 mW avg -> ~1.5 W peak
        let peak = p.average_power_mw * 1e-3 / p.duty_factor();
        p.peak_power_w = Some(peak);
        assert!(p.validate().is_ok());
        p.peak_power_w = Some(peak * 1.05);
        assert!(matches!(
            p.validate(),
            Err(SpectralError::PowerInconsistent { .. })
        ));
        p.peak_power_w = None;
        assert_relative_eq!(p.peak_power(), peak, max_relative = 1e-12);
    }
}
