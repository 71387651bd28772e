//! Joint spectral amplitude of the filtered signal-idler pair.
//!
//! ```text
//! F(ws, wi) ~ E2(ws + wi) * sinc(dk L/2) e^{i dk L/2} * Hs(ws) * Hi(wi)
//! ```
//!
//! `E2` is the autoconvolution of the pump spectral amplitude (the energy
//! spectrum of the two annihilated pump photons), evaluated by an exact
//! discrete convolution on a pump lattice commensurate with the grid.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::table::{Cell, Table};

use super::{
    build_pump_spectrum, filter_transmission, phase_mismatch, FiberSpec, FilterSpec,
    FrequencyGrid, PumpSpec, SpectralError,
};

/// Discretized, L2-normalized joint spectral amplitude.
#[derive(Debug, Clone)]
pub struct JsaMatrix {
    pub grid: FrequencyGrid,
    /// amplitude[(i, j)] = F(ws_i, wi_j); rows follow the signal axis.
    pub amplitude: DMatrix<Complex64>,
    /// Norm of the unnormalized amplitude, sqrt(sum |F|^2 dw^2).
    pub norm: f64,
}

impl JsaMatrix {
    /// Discrete L2 norm squared: sum |F|^2 dw^2. One after construction.
    pub fn norm_sq(&self) -> f64 {
        let dw = self.grid.spacing();
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dw * dw
    }

    /// Normalized signal-band intensity spectrum S(ws), sum S dw = 1.
    pub fn signal_marginal(&self) -> (Vec<f64>, Vec<f64>) {
        let dw = self.grid.spacing();
        let n = self.grid.n_points;
        let axis = self.grid.signal_axis();
        let mut s = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                s[i] += self.amplitude[(i, j)].norm_sqr();
            }
            s[i] *= dw;
        }
        let total: f64 = s.iter().sum::<f64>() * dw;
        s.iter_mut().for_each(|v| *v /= total);
        (axis, s)
    }

    /// Debug export: (ws, wi, Re F, Im F) rows.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["omega_s_rad_ps", "omega_i_rad_ps", "re", "im"]);
        let ws = self.grid.signal_axis();
        let wi = self.grid.idler_axis();
        for i in 0..self.grid.n_points {
            for j in 0..self.grid.n_points {
                let a = self.amplitude[(i, j)];
                t.push(vec![
                    Cell::Real(ws[i]),
                    Cell::Real(wi[j]),
                    Cell::Real(a.re),
                    Cell::Real(a.im),
                ])
                .expect("fixed-width row");
            }
        }
        t
    }
}

/// Default grid for a doubly-filtered pair: centers at the filter centers,
/// span six times the widest of the two filters and the pump.
pub fn grid_for_pair(
    pump: &PumpSpec,
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
    n_points: usize,
) -> Result<FrequencyGrid, SpectralError> {
    let span = 6.0
        * pump
            .fwhm_omega()
            .max(filter_s.fwhm_omega())
            .max(filter_i.fwhm_omega());
    FrequencyGrid::new(
        filter_s.center_omega(),
        filter_i.center_omega(),
        span,
        n_points,
    )
}

/// Grid for single-band analysis (one measured band, conjugate band open):
/// the idler extent is set by the pump energy spectrum, sqrt(2) wider than
/// the pump itself.
pub fn grid_for_measured_band(
    pump: &PumpSpec,
    filter_s: &FilterSpec,
    n_points: usize,
) -> Result<FrequencyGrid, SpectralError> {
    let wp = crate::constants::omega_of_wavelength(pump.center_wavelength_nm);
    let ws0 = filter_s.center_omega();
    let span = 6.0 * (std::f64::consts::SQRT_2 * pump.fwhm_omega()).max(filter_s.fwhm_omega());
    FrequencyGrid::new(ws0, 2.0 * wp - ws0, span, n_points)
}

/// Open-filter stand-in for an unmeasured conjugate band: flat to better
/// than 1e-12 across any grid the span rules above produce.
pub fn open_conjugate_filter(grid: &FrequencyGrid) -> FilterSpec {
    let center = crate::constants::wavelength_of_omega(grid.center_idler);
    let fwhm_omega = grid.span * 1e6;
    let fwhm_nm = fwhm_omega * center * center
        / (2.0 * std::f64::consts::PI * crate::constants::C_NM_PER_PS);
    FilterSpec::open(center, fwhm_nm)
}

/// Build the normalized JSA on `grid`.
pub fn build_jsa(
    pump: &PumpSpec,
    fiber: &FiberSpec,
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
    grid: &FrequencyGrid,
) -> Result<JsaMatrix, SpectralError> {
    pump.validate()?;
    let n = grid.n_points;
    let dw = grid.spacing();
    let ws = grid.signal_axis();
    let wi = grid.idler_axis();
    let peak_power = pump.peak_power();

    // Pump sum-energy spectrum on the sum lattice s_m = ws[0] + wi[0] + m dw.
    // Sampling the pump on x_k = (ws[0] + wi[0])/2 + k dw makes
    // s_m - x_k = x_{m-k}, so the autoconvolution is an exact lattice sum.
    let x0 = (ws[0] + wi[0]) / 2.0;
    let wp = crate::constants::omega_of_wavelength(pump.center_wavelength_nm);
    let half_support = 6.0 * pump.fwhm_omega();
    let ka = ((wp - half_support - x0) / dw).floor() as i64;
    let kb = ((wp + half_support - x0) / dw).ceil() as i64;
    let pump_axis: Vec<f64> = (ka..=kb).map(|k| x0 + k as f64 * dw).collect();
    let pump_amp = build_pump_spectrum(pump, &pump_axis)?;
    let a = |k: i64| -> Complex64 {
        if (ka..=kb).contains(&k) {
            pump_amp.amplitude[(k - ka) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let n_sums = 2 * n - 1;
    let mut e2 = vec![Complex64::new(0.0, 0.0); n_sums];
    for (m, e) in e2.iter_mut().enumerate() {
        let m = m as i64;
        let lo = ka.max(m - kb);
        let hi = kb.min(m - ka);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in lo..=hi {
            acc += a(k) * a(m - k);
        }
        *e = acc * dw;
    }

    let mut amplitude = DMatrix::<Complex64>::zeros(n, n);
    let hs: Vec<Complex64> = ws.iter().map(|&w| filter_transmission(filter_s, w)).collect();
    let hi_t: Vec<Complex64> = wi.iter().map(|&w| filter_transmission(filter_i, w)).collect();
    for i in 0..n {
        for j in 0..n {
            let sum = ws[i] + wi[j];
            let dk = phase_mismatch(ws[i], wi[j], fiber, sum / 2.0, peak_power);
            let phi = dk * fiber.length_km / 2.0;
            let pm = Complex64::from_polar(sinc(phi), phi);
            amplitude[(i, j)] = e2[i + j] * pm * hs[i] * hi_t[j];
        }
    }

    let norm = (amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dw * dw).sqrt();
    if norm < 1e-30 {
        return Err(SpectralError::NormalizationFailure { norm });
    }
    amplitude.iter_mut().for_each(|v| *v /= norm);
    Ok(JsaMatrix {
        grid: grid.clone(),
        amplitude,
        norm,
    })
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
