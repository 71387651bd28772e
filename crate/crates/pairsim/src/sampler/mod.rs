//! Monte-Carlo photon-number generation: four-wave-mixing pairs per Schmidt
//! mode, multimode Raman background, and detector click conversion.

mod detector;
mod stream;

pub use detector::{detect, DetectorSpec};
pub use stream::{run_gated_stream, run_split_stream, Channel, ClickRecord, ClickStream};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modes::SchmidtSpectrum;
use crate::spectral::PumpSpec;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("calibration coefficient {name} must be >= 0, got {value}")]
    NegativeCoefficient { name: &'static str, value: f64 },
}

/// Linear (Raman) and quadratic (FWM) photon-yield calibration, per mW of
/// average pump power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibCoefficients {
    /// Mean Raman photons per pulse per mW.
    pub linear_per_mw: f64,
    /// Mean FWM pairs per pulse per mW^2.
    pub quad_per_mw2: f64,
}

/// Photon-number statistics of one source at a fixed pump power.
#[derive(Debug, Clone)]
pub struct SourceState {
    /// Mean FWM pairs per pulse, summed over Schmidt modes.
    pub pair_mean: f64,
    /// Schmidt spectrum distributing the pair mean over modes.
    pub schmidt: SchmidtSpectrum,
    /// Mean Raman photons per pulse in the signal band.
    pub raman_mean_s: f64,
    /// Mean Raman photons per pulse in the idler band.
    pub raman_mean_i: f64,
    /// Effective thermal mode count of the broadband Raman background.
    pub raman_mode_count: u32,
}

impl SourceState {
    /// Mode means used by the samplers: pair_mean * lambda_n, with
    /// negligible tails dropped.
    pub fn sampling_means(&self) -> Vec<f64> {
        self.schmidt
            .coefficients
            .iter()
            .map(|l| self.pair_mean * l)
            .filter(|&m| m > self.pair_mean * 1e-9 && m > 0.0)
            .collect()
    }

    /// Mean photons per pulse in the signal band (FWM + Raman).
    pub fn signal_mean(&self) -> f64 {
        self.pair_mean + self.raman_mean_s
    }
}

/// Split the calibrated photon yield into FWM (quadratic in average power)
/// and Raman (linear) means.
pub fn derive_source_state(
    pump: &PumpSpec,
    schmidt: &SchmidtSpectrum,
    calib: CalibCoefficients,
    raman_mode_count: u32,
) -> Result<SourceState, SamplerError> {
    if calib.linear_per_mw < 0.0 {
        return Err(SamplerError::NegativeCoefficient {
            name: "linear_per_mw",
            value: calib.linear_per_mw,
        });
    }
    if calib.quad_per_mw2 < 0.0 {
        return Err(SamplerError::NegativeCoefficient {
            name: "quad_per_mw2",
            value: calib.quad_per_mw2,
        });
    }
    let p = pump.average_power_mw;
    Ok(SourceState {
        pair_mean: calib.quad_per_mw2 * p * p,
        schmidt: schmidt.clone(),
        raman_mean_s: calib.linear_per_mw * p,
        raman_mean_i: calib.linear_per_mw * p,
        raman_mode_count: raman_mode_count.max(1),
    })
}

/// Photon numbers generated in one pump pulse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseRecord {
    pub pulse_index: u64,
    /// FWM photons per Schmidt mode in the signal band.
    pub n_signal_by_mode: Vec<u32>,
    /// FWM photons per Schmidt mode in the idler band; equal to the signal
    /// vector at generation (pair correlation, before any loss).
    pub n_idler_by_mode: Vec<u32>,
    pub n_raman_s: u32,
    pub n_raman_i: u32,
}

impl PulseRecord {
    pub fn signal_total(&self) -> u32 {
        self.n_signal_by_mode.iter().sum::<u32>() + self.n_raman_s
    }

    pub fn idler_total(&self) -> u32 {
        self.n_idler_by_mode.iter().sum::<u32>() + self.n_raman_i
    }
}

/// Bose-Einstein (geometric on {0,1,2,..}) sample with the given mean.
#[inline]
pub fn sample_thermal(mean: f64, rng: &mut impl Rng) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    // P(n >= k) = (mean/(1+mean))^k
    let p = mean / (1.0 + mean);
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    if u >= p {
        return 0;
    }
    (u.ln() / p.ln()) as u32
}

/// Multimode thermal sample: sum of `modes` independent Bose-Einstein draws
/// sharing the total mean (negative binomial).
#[inline]
pub fn sample_multimode_thermal(total_mean: f64, modes: u32, rng: &mut impl Rng) -> u32 {
    if total_mean <= 0.0 {
        return 0;
    }
    let per_mode = total_mean / modes as f64;
    (0..modes).map(|_| sample_thermal(per_mode, rng)).sum()
}

/// Draw the photon numbers of one pulse.
pub fn sample_pulse(state: &SourceState, pulse_index: u64, rng: &mut impl Rng) -> PulseRecord {
    let means = state.sampling_means();
    let pairs: Vec<u32> = means.iter().map(|&m| sample_thermal(m, rng)).collect();
    let n_raman_s = sample_multimode_thermal(state.raman_mean_s, state.raman_mode_count, rng);
    let n_raman_i = sample_multimode_thermal(state.raman_mean_i, state.raman_mode_count, rng);
    PulseRecord {
        pulse_index,
        n_signal_by_mode: pairs.clone(),
        n_idler_by_mode: pairs,
        n_raman_s,
        n_raman_i,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{block_rng, StreamKind};
    use crate::spectral::PulseShape;
    use approx::assert_relative_eq;

    fn pump_at(power_mw: f64) -> PumpSpec {
        PumpSpec {
            center_wavelength_nm: 1538.9,
            fwhm_nm: 0.9,
            pulse_shape: PulseShape::Gaussian,
            peak_power_w: None,
            average_power_mw: power_mw,
            repetition_rate_mhz: 40.0,
        }
    }

    const CALIB: CalibCoefficients = CalibCoefficients {
        linear_per_mw: 0.002,
        quad_per_mw2: 0.1,
    };

    #[test]
    fn zero_power_means_zero() {
        let s =
            derive_source_state(&pump_at(0.0), &SchmidtSpectrum::single_mode(), CALIB, 10).unwrap();
        assert_eq!(s.pair_mean, 0.0);
        assert_eq!(s.raman_mean_s, 0.0);
        let mut rng = block_rng(0, StreamKind::Scratch, 0);
        let rec = sample_pulse(&s, 0, &mut rng);
        assert_eq!(rec.signal_total(), 0);
        assert_eq!(rec.idler_total(), 0);
    }

    #[test]
    fn pure_fwm_is_exactly_quadratic() {
        let calib = CalibCoefficients {
            linear_per_mw: 0.0,
            quad_per_mw2: 0.1,
        };
        let a =
            derive_source_state(&pump_at(1.0), &SchmidtSpectrum::single_mode(), calib, 10).unwrap();
        let b =
            derive_source_state(&pump_at(2.0), &SchmidtSpectrum::single_mode(), calib, 10).unwrap();
        assert_relative_eq!(a.pair_mean, 0.1, max_relative = 1e-12);
        assert_relative_eq!(b.pair_mean / a.pair_mean, 4.0, max_relative = 1e-12);
        assert_eq!(a.raman_mean_s, 0.0);
    }

    #[test]
    fn negative_coefficients_rejected() {
        let calib = CalibCoefficients {
            linear_per_mw: -1.0,
            quad_per_mw2: 0.1,
        };
        assert!(matches!(
            derive_source_state(&pump_at(1.0), &SchmidtSpectrum::single_mode(), calib, 10),
            Err(SamplerError::NegativeCoefficient { .. })
        ));
    }

    #[test]
    fn pair_counts_are_equal_mode_by_mode() {
        let spectrum = SchmidtSpectrum::synthetic(vec![0.6, 0.3, 0.1]);
        let state = SourceState {
            pair_mean: 2.0,
            schmidt: spectrum,
            raman_mean_s: 0.5,
            raman_mean_i: 0.5,
            raman_mode_count: 10,
        };
        let mut rng = block_rng(3, StreamKind::Scratch, 0);
        for i in 0..1000 {
            let rec = sample_pulse(&state, i, &mut rng);
            assert_eq!(rec.n_signal_by_mode, rec.n_idler_by_mode);
        }
    }

    /// Analytic thermal moments: <n> = mu, <n(n-1)> = 2 mu^2.
    #[test]
    fn single_mode_thermal_moments() {
        let state = SourceState {
            pair_mean: 0.1,
            schmidt: SchmidtSpectrum::single_mode(),
            raman_mean_s: 0.0,
            raman_mean_i: 0.0,
            raman_mode_count: 10,
        };
        let mut rng = block_rng(7, StreamKind::Scratch, 0);
        let n_pulses = 1_000_000u64;
        let mut sum = 0u64;
        let mut sum_ff = 0u64; // n(n-1)
        for i in 0..n_pulses {
            let n = sample_pulse(&state, i, &mut rng).signal_total() as u64;
            sum += n;
            sum_ff += n * (n - n.min(1));
        }
        let mean = sum as f64 / n_pulses as f64;
        // 3 sigma of the mean: sigma^2 = mu(1+mu)
        let sigma_mean = (0.1f64 * 1.1 / n_pulses as f64).sqrt();
        assert!((mean - 0.1).abs() < 3.0 * sigma_mean, "mean {mean}");
        let g2 = (sum_ff as f64 / n_pulses as f64) / (mean * mean);
        // block out the sampling noise generously: thermal g2 = 2
        assert!((g2 - 2.0).abs() < 0.03, "g2 {g2}");
    }

    /// Two equal modes halve the excess correlation: g2 = 1 + 1/2.
    #[test]
    fn two_mode_field_g2() {
        let state = SourceState {
            pair_mean: 0.1,
            schmidt: SchmidtSpectrum::synthetic(vec![0.5, 0.5]),
            raman_mean_s: 0.0,
            raman_mean_i: 0.0,
            raman_mode_count: 10,
        };
        let mut rng = block_rng(8, StreamKind::Scratch, 0);
        let n_pulses = 1_000_000u64;
        let (mut sum, mut sum_ff) = (0u64, 0u64);
        for i in 0..n_pulses {
            let n = sample_pulse(&state, i, &mut rng).signal_total() as u64;
            sum += n;
            sum_ff += n * (n - n.min(1));
        }
        let mean = sum as f64 / n_pulses as f64;
        let g2 = (sum_ff as f64 / n_pulses as f64) / (mean * mean);
        assert!((g2 - 1.5).abs() < 0.03, "g2 {g2}");
    }

    #[test]
    fn thermal_sampler_matches_geometric_distribution() {
        // chi-square against the geometric pmf, p > 0.001 at 1e6 draws
        let mut rng = block_rng(9, StreamKind::Scratch, 0);
        let mu = 0.8f64;
        let n = 1_000_000usize;
        let mut hist = [0u64; 12];
        for _ in 0..n {
            let k = sample_thermal(mu, &mut rng) as usize;
            hist[k.min(11)] += 1;
        }
        let p = mu / (1.0 + mu);
        let mut chi2 = 0.0;
        let mut dof = 0;
        for (k, &obs) in hist.iter().enumerate() {
            let prob = if k < 11 {
                (1.0 - p) * p.powi(k as i32)
            } else {
                p.powi(11)
            };
            let exp = prob * n as f64;
            if exp >= 5.0 {
                chi2 += (obs as f64 - exp).powi(2) / exp;
                dof += 1;
            }
        }
        let dof = (dof - 1) as f64;
        // p > 0.001 <=> chi2 below the 0.999 quantile
        let quantile_999 = statrs::distribution::ContinuousCDF::inverse_cdf(
            &statrs::distribution::ChiSquared::new(dof).unwrap(),
            0.999,
        );
        assert!(chi2 < quantile_999, "chi2 {chi2} dof {dof} q {quantile_999}");
    }

    #[test]
    fn multimode_mean_is_preserved() {
        let mut rng = block_rng(10, StreamKind::Scratch, 0);
        let n = 400_000;
        let total: u64 = (0..n)
            .map(|_| sample_multimode_thermal(1.5, 10, &mut rng) as u64)
            .sum();
        let mean = total as f64 / n as f64;
        // negative binomial variance mu(1 + mu/R)
        let sigma = (1.5f64 * (1.0 + 0.15) / n as f64).sqrt();
        assert!((mean - 1.5).abs() < 3.0 * sigma, "mean {mean}");
    }
}
