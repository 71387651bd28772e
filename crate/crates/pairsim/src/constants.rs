//! Physical constants and unit conversions.
//!
//! Internal unit system: angular frequencies in rad/ps, wavelengths in nm,
//! fiber lengths in km, propagation constants in ps^k/km, powers in W (peak)
//! and mW (average), time in ps unless a field name says otherwise.

/// Speed of light in nm/ps.
pub const C_NM_PER_PS: f64 = 299_792.458;

/// Angular frequency (rad/ps) of a vacuum wavelength in nm.
pub fn omega_of_wavelength(lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_NM_PER_PS / lambda_nm
}

/// Vacuum wavelength (nm) of an angular frequency in rad/ps.
pub fn wavelength_of_omega(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_NM_PER_PS / omega
}

/// Angular-frequency width (rad/ps) of a small wavelength width at `lambda_nm`.
///
/// First-order conversion `dw = 2 pi c dlambda / lambda^2`.
pub fn domega_of_dlambda(dlambda_nm: f64, lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_NM_PER_PS * dlambda_nm / (lambda_nm * lambda_nm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn omega_roundtrip() {
        let w = omega_of_wavelength(1538.9);
        assert_relative_eq!(wavelength_of_omega(w), 1538.9, max_relative = 1e-12);
    }

    #[test]
    fn pump_bandwidth_conversion() {
        // 0.9 nm at 1538.9 nm; direct unit-conversion oracle
        let dw = domega_of_dlambda(0.9, 1538.9);
        let expected = 2.0 * std::f64::consts::PI * 299_792.458 * 0.9 / (1538.9 * 1538.9);
        assert_relative_eq!(dw, expected, max_relative = 1e-14);
        assert!((dw - 0.7159).abs() < 5e-4, "dw = {dw}");
    }
}
