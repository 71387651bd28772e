//! Temporal mode overlap from the filtered signal spectrum.

use num_complex::Complex64;

use crate::spectral::JsaMatrix;

/// Normalized intensity spectrum of the filtered signal field.
#[derive(Debug, Clone)]
pub struct SignalSpectrum {
    pub omega: Vec<f64>,
    /// sum(intensity) * spacing = 1
    pub intensity: Vec<f64>,
}

impl SignalSpectrum {
    pub fn from_jsa(jsa: &JsaMatrix) -> Self {
        let (omega, intensity) = jsa.signal_marginal();
        SignalSpectrum { omega, intensity }
    }

    /// Analytic Gaussian spectrum, mostly for tests and synthetic benches.
    pub fn gaussian(center: f64, fwhm: f64, span: f64, n: usize) -> Self {
        let d = span / (n - 1) as f64;
        let omega: Vec<f64> = (0..n).map(|i| center - span / 2.0 + i as f64 * d).collect();
        let ln2 = std::f64::consts::LN_2;
        let mut intensity: Vec<f64> = omega
            .iter()
            .map(|&w| (-4.0 * ln2 * ((w - center) / fwhm).powi(2)).exp())
            .collect();
        let total: f64 = intensity.iter().sum::<f64>() * d;
        intensity.iter_mut().for_each(|v| *v /= total);
        SignalSpectrum { omega, intensity }
    }

    pub fn spacing(&self) -> f64 {
        if self.omega.len() > 1 {
            self.omega[1] - self.omega[0]
        } else {
            1.0
        }
    }

    /// Intensity FWHM in rad/ps, measured from the samples.
    pub fn fwhm(&self) -> f64 {
        let peak = self.intensity.iter().cloned().fold(0.0, f64::max);
        let half = peak / 2.0;
        let mut left = None;
        let mut right = None;
        for i in 1..self.intensity.len() {
            let (a, b) = (self.intensity[i - 1], self.intensity[i]);
            if left.is_none() && a < half && b >= half {
                left = Some(self.omega[i - 1] + (half - a) / (b - a) * self.spacing());
            }
            if a >= half && b < half {
                right = Some(self.omega[i - 1] + (a - half) / (a - b) * self.spacing());
            }
        }
        match (left, right) {
            (Some(l), Some(r)) => r - l,
            _ => 0.0,
        }
    }

    /// Coherence time, ps: delay at which the overlap of a Gaussian spectrum
    /// falls to 1/e, sqrt(8 ln2)/FWHM.
    pub fn coherence_time_ps(&self) -> f64 {
        (8.0 * std::f64::consts::LN_2).sqrt() / self.fwhm()
    }

    /// First-order coherence magnitude squared at `delay_ps`:
    /// |integral S(w) e^{i w tau} dw|^2.
    pub fn mode_overlap(&self, delay_ps: f64) -> f64 {
        mode_overlap(self, delay_ps)
    }
}

/// Squared magnitude of the Fourier transform of the normalized intensity
/// spectrum at delay tau; 1 at tau = 0, 0 for delays far beyond the
/// coherence time.
pub fn mode_overlap(spectrum: &SignalSpectrum, delay_ps: f64) -> f64 {
    let d = spectrum.spacing();
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, s) in spectrum.omega.iter().zip(&spectrum.intensity) {
        acc += Complex64::from_polar(s * d, w * delay_ps);
    }
    acc.norm_sqr().min(1.0)
}
