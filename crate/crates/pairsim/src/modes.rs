//! Schmidt-mode analysis: decomposition of the JSA and the coherence
//! observables it predicts, g2 = 1 + 1/K for one chaotic band and the
//! two-source HOM visibility V = 1/(2K + 1).

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{
    build_jsa, grid_for_measured_band, open_conjugate_filter, FiberSpec, FilterSpec, JsaMatrix,
    PumpSpec, SpectralError,
};

/// Coefficients below this threshold are dropped when reporting K.
const COEFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModesError {
    #[error("SVD did not converge")]
    NumericalFailure,
    #[error("mode number must be >= 1, got {0}")]
    DomainError(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Schmidt decomposition of a normalized JSA.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    /// Normalized weights, non-increasing, sum 1.
    pub coefficients: Vec<f64>,
    /// Signal mode functions, one column per kept mode.
    pub signal_modes: DMatrix<Complex64>,
    /// Idler mode functions, one column per kept mode.
    pub idler_modes: DMatrix<Complex64>,
}

impl SchmidtSpectrum {
    /// Spectrum with prescribed weights and trivial mode functions; used to
    /// configure synthetic sources in tests and scenarios.
    pub fn synthetic(coefficients: Vec<f64>) -> Self {
        let k = coefficients.len();
        let total: f64 = coefficients.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "weights must sum to 1");
        SchmidtSpectrum {
            coefficients,
            signal_modes: DMatrix::identity(k, k),
            idler_modes: DMatrix::identity(k, k),
        }
    }

    /// Exactly single-mode spectrum.
    pub fn single_mode() -> Self {
        SchmidtSpectrum::synthetic(vec![1.0])
    }
}

/// Singular value decomposition of the JSA amplitude; weights are squared
/// singular values normalized to unit sum.
pub fn schmidt_decompose(jsa: &JsaMatrix) -> Result<SchmidtSpectrum, ModesError> {
    let svd = jsa
        .amplitude
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(ModesError::NumericalFailure)?;
    let u = svd.u.ok_or(ModesError::NumericalFailure)?;
    let v_t = svd.v_t.ok_or(ModesError::NumericalFailure)?;
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let coefficients: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| s * s / total)
        .collect();
    // try_svd returns values sorted in decreasing order
    let kept = coefficients.len();
    let signal_modes = u.columns(0, kept).into_owned();
    let idler_modes = v_t.rows(0, kept).transpose().map(|z| z.conj());
    Ok(SchmidtSpectrum {
        coefficients,
        signal_modes,
        idler_modes,
    })
}

/// Effective mode number K = 1 / sum(lambda_n^2), with sub-1e-12 weights
/// truncated.
pub fn effective_mode_number(spectrum: &SchmidtSpectrum) -> f64 {
    let s2: f64 = spectrum
        .coefficients
        .iter()
        .filter(|&&l| l >= COEFF_FLOOR)
        .map(|l| l * l)
        .sum();
    1.0 / s2
}

/// g2 of one chaotic (thermal) band with K effective modes.
pub fn predict_g2(k: f64) -> Result<f64, ModesError> {
    if k < 1.0 - 1e-9 {
        return Err(ModesError::DomainError(k));
    }
    Ok(1.0 + 1.0 / k.max(1.0))
}

/// Two-source HOM dip visibility for matched K-mode chaotic fields.
pub fn predict_hom_visibility(k: f64) -> Result<f64, ModesError> {
    if k < 1.0 - 1e-9 {
        return Err(ModesError::DomainError(k));
    }
    Ok(1.0 / (2.0 * k.max(1.0) + 1.0))
}

/// Mode number and both derived observables in one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePrediction {
    pub mode_number: f64,
    pub g2: f64,
    pub hom_visibility: f64,
}

impl CoherencePrediction {
    pub fn from_mode_number(k: f64) -> Result<Self, ModesError> {
        Ok(CoherencePrediction {
            mode_number: k,
            g2: predict_g2(k)?,
            hom_visibility: predict_hom_visibility(k)?,
        })
    }
}

/// Prediction chain for one measured band: JSA with the band's filter on the
/// measured axis and the conjugate band open (the unmeasured photon is traced
/// over whatever the fiber emitted, not over its filtered version), then
/// Schmidt K, then the coherence observables.
pub fn measured_band_analysis(
    pump: &PumpSpec,
    fiber: &FiberSpec,
    filter_s: &FilterSpec,
    n_points: usize,
) -> Result<(JsaMatrix, SchmidtSpectrum, CoherencePrediction), ModesError> {
    let grid = grid_for_measured_band(pump, filter_s, n_points)?;
    let open = open_conjugate_filter(&grid);
    let jsa = build_jsa(pump, fiber, filter_s, &open, &grid)?;
    let spectrum = schmidt_decompose(&jsa)?;
    let k = effective_mode_number(&spectrum);
    let prediction = CoherencePrediction::from_mode_number(k)?;
    Ok((jsa, spectrum, prediction))
}
