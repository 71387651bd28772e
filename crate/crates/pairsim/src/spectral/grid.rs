//! Frequency grid for the two-photon amplitude.

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Square sampling grid for F(w_s, w_i): one axis per photon, equal span and
/// point count, centered on the two band centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    /// Signal-axis center, rad/ps.
    pub center_signal: f64,
    /// Idler-axis center, rad/ps.
    pub center_idler: f64,
    /// Full width of each axis, rad/ps.
    pub span: f64,
    /// Samples per axis; power of two, at least 16.
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(
        center_signal: f64,
        center_idler: f64,
        span: f64,
        n_points: usize,
    ) -> Result<Self, SpectralError> {
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(SpectralError::BadGridSize(n_points));
        }
        if !(span > 0.0) {
            return Err(SpectralError::BadSpan(span));
        }
        Ok(FrequencyGrid {
            center_signal,
            center_idler,
            span,
            n_points,
        })
    }

    /// Grid spacing span/(n_points - 1).
    pub fn spacing(&self) -> f64 {
        self.span / (self.n_points - 1) as f64
    }

    pub fn signal_axis(&self) -> Vec<f64> {
        axis(self.center_signal, self.span, self.n_points)
    }

    pub fn idler_axis(&self) -> Vec<f64> {
        axis(self.center_idler, self.span, self.n_points)
    }
}

fn axis(center: f64, span: f64, n: usize) -> Vec<f64> {
    let d = span / (n - 1) as f64;
    let start = center - span / 2.0;
    (0..n).map(|i| start + i as f64 * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axes_are_centered_and_evenly_spaced() {
        let g = FrequencyGrid::new(1218.0, 1230.0, 4.0, 64).unwrap();
        let s = g.signal_axis();
        assert_eq!(s.len(), 64);
        assert_relative_eq!(s[0], 1216.0, max_relative = 1e-12);
        assert_relative_eq!(s[63], 1220.0, max_relative = 1e-12);
        assert_relative_eq!((s[0] + s[63]) / 2.0, 1218.0, max_relative = 1e-12);
        assert_relative_eq!(s[1] - s[0], g.spacing(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(FrequencyGrid::new(0.0, 0.0, 1.0, 8).is_err());
        assert!(FrequencyGrid::new(0.0, 0.0, 1.0, 48).is_err());
        assert!(FrequencyGrid::new(0.0, 0.0, -1.0, 64).is_err());
        assert!(FrequencyGrid::new(0.0, 0.0, 0.0, 64).is_err());
    }
}
