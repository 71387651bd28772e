//! Bandpass filter transmission profiles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{domega_of_dlambda, omega_of_wavelength};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterShape {
    Gaussian,
    /// Flat-top profile exp(-ln2 (2 d/FWHM)^(2 order)).
    SuperGaussian { order: u32 },
}

/// Idealized bandpass filter: unit peak transmission, flat phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Center wavelength, nm.
    pub center_wavelength_nm: f64,
    /// Intensity FWHM, nm.
    pub fwhm_nm: f64,
    pub shape: FilterShape,
}

impl FilterSpec {
    pub fn gaussian(center_wavelength_nm: f64, fwhm_nm: f64) -> Self {
        FilterSpec {
            center_wavelength_nm,
            fwhm_nm,
            shape: FilterShape::Gaussian,
        }
    }

    /// Wide pass-through stand-in used when a band is detected unfiltered.
    /// The width is chosen per call site so it is flat across the grid.
    pub fn open(center_wavelength_nm: f64, fwhm_nm: f64) -> Self {
        FilterSpec::gaussian(center_wavelength_nm, fwhm_nm)
    }

    pub fn center_omega(&self) -> f64 {
        omega_of_wavelength(self.center_wavelength_nm)
    }

    pub fn fwhm_omega(&self) -> f64 {
        domega_of_dlambda(self.fwhm_nm, self.center_wavelength_nm)
    }
}

/// Complex amplitude transmission at angular frequency `omega` (rad/ps).
///
/// Intensity transmission has FWHM equal to the filter bandwidth; the phase
/// is flat.
pub fn filter_transmission(filter: &FilterSpec, omega: f64) -> Complex64 {
    let x = 2.0 * (omega - filter.center_omega()) / filter.fwhm_omega();
    let log_intensity = match filter.shape {
        FilterShape::Gaussian => -LN2 * x * x,
        FilterShape::SuperGaussian { order } => -LN2 * x.powi(2 * order as i32),
    };
    Complex64::new((log_intensity / 2.0).exp(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unity_at_center() {
        let f = FilterSpec::gaussian(1546.9, 0.33);
        assert_relative_eq!(
            filter_transmission(&f, f.center_omega()).re,
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn half_intensity_at_half_fwhm() {
        let f = FilterSpec::gaussian(1546.9, 0.33);
        for sign in [-1.0, 1.0] {
            let w = f.center_omega() + sign * f.fwhm_omega() / 2.0;
            let t = filter_transmission(&f, w).norm_sqr();
            assert_relative_eq!(t, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn supergaussian_half_intensity_at_half_fwhm() {
        // closed-form exponent oracle: exp(-ln2 * 1^(2m)) = 1/2 for any order
        let f = FilterSpec {
            center_wavelength_nm: 1530.9,
            fwhm_nm: 0.33,
            shape: FilterShape::SuperGaussian { order: 4 },
        };
        let w = f.center_omega() - f.fwhm_omega() / 2.0;
        assert_relative_eq!(filter_transmission(&f, w).norm_sqr(), 0.5, epsilon = 1e-9);
        // flatter top than a gaussian at quarter FWHM
        let wq = f.center_omega() + f.fwhm_omega() / 4.0;
        let g = FilterSpec::gaussian(1530.9, 0.33);
        assert!(
            filter_transmission(&f, wq).norm_sqr() > filter_transmission(&g, wq).norm_sqr()
        );
    }
}
