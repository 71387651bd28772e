//! Dip-curve fitting and visibility extraction.

use super::HomError;

/// One measured scan point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipPoint {
    pub delay_ps: f64,
    pub coincidences: f64,
    /// One-sigma counting error.
    pub error: f64,
}

/// Fitted dip curve.
#[derive(Debug, Clone)]
pub struct DipCurve {
    pub points: Vec<DipPoint>,
    pub baseline: f64,
    pub minimum: f64,
    pub visibility: f64,
    pub visibility_error: f64,
    /// Fitted dip center.
    pub center_ps: f64,
}

impl DipCurve {
    /// Model value at one delay, for CSV output next to the data.
    pub fn fit_value(&self, overlap: impl Fn(f64) -> f64, delay_ps: f64) -> f64 {
        self.baseline * (1.0 - self.visibility * overlap(delay_ps - self.center_ps))
    }
}

/// Least-squares fit of `baseline * (1 - V * O(tau - tau0))` with free
/// (baseline, V, tau0); `overlap` supplies O. The center is profiled over a
/// fine grid and refined parabolically; (baseline, baseline*V) solve a 2x2
/// weighted linear system at each candidate center.
pub fn extract_visibility(
    points: &[DipPoint],
    overlap: impl Fn(f64) -> f64,
) -> Result<DipCurve, HomError> {
    if points.len() < 7 {
        return Err(HomError::TooFewPoints(points.len()));
    }
    let lo = points.iter().map(|p| p.delay_ps).fold(f64::INFINITY, f64::min);
    let hi = points
        .iter()
        .map(|p| p.delay_ps)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(HomError::DegenerateScan);
    }

    let chi2_of = |tau0: f64| linear_fit(points, &overlap, tau0).map(|f| f.chi2);
    let n_grid = 201;
    let mut best = (f64::INFINITY, lo);
    for i in 0..n_grid {
        let tau0 = lo + (hi - lo) * i as f64 / (n_grid - 1) as f64;
        if let Some(chi2) = chi2_of(tau0) {
            if chi2 < best.0 {
                best = (chi2, tau0);
            }
        }
    }
    // parabolic refinement around the best grid point
    let h = (hi - lo) / (n_grid - 1) as f64;
    let tau0 = match (chi2_of(best.1 - h), chi2_of(best.1), chi2_of(best.1 + h)) {
        (Some(cm), Some(c0), Some(cp)) => {
            let denom = cm - 2.0 * c0 + cp;
            if denom.abs() > 1e-300 {
                (best.1 - 0.5 * h * (cp - cm) / denom).clamp(lo, hi)
            } else {
                best.1
            }
        }
        _ => best.1,
    };

    let fit = linear_fit(points, &overlap, tau0).ok_or(HomError::DegenerateScan)?;
    let baseline = fit.baseline;
    let dip_depth = fit.depth;
    if baseline <= 0.0 {
        return Err(HomError::DegenerateScan);
    }
    let visibility = dip_depth / baseline;
    // delta method on V = D/B with the 2x2 covariance from the linear fit
    let g_b = -dip_depth / (baseline * baseline);
    let g_d = 1.0 / baseline;
    let var = g_b * g_b * fit.cov_bb + g_d * g_d * fit.cov_dd + 2.0 * g_b * g_d * fit.cov_bd;
    let visibility_error = var.max(0.0).sqrt();
    if visibility < 2.0 * visibility_error {
        return Err(HomError::NoDip {
            visibility,
            sigma: visibility_error,
        });
    }
    Ok(DipCurve {
        points: points.to_vec(),
        baseline,
        minimum: baseline * (1.0 - visibility),
        visibility,
        visibility_error,
        center_ps: tau0,
    })
}

struct LinearFit {
    baseline: f64,
    depth: f64,
    chi2: f64,
    cov_bb: f64,
    cov_dd: f64,
    cov_bd: f64,
}

/// Weighted linear solve of C_i = B - D * O(tau_i - tau0).
fn linear_fit(
    points: &[DipPoint],
    overlap: &impl Fn(f64) -> f64,
    tau0: f64,
) -> Option<LinearFit> {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let w = 1.0 / p.error.max(1.0).powi(2);
        let o = overlap(p.delay_ps - tau0);
        s11 += w;
        s12 += w * (-o);
        s22 += w * o * o;
        b1 += w * p.coincidences;
        b2 += w * (-o) * p.coincidences;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-300 {
        return None;
    }
    let baseline = (s22 * b1 - s12 * b2) / det;
    let depth = (-s12 * b1 + s11 * b2) / det;
    let mut chi2 = 0.0;
    for p in points {
        let w = 1.0 / p.error.max(1.0).powi(2);
        let model = baseline - depth * overlap(p.delay_ps - tau0);
        chi2 += w * (p.coincidences - model).powi(2);
    }
    Some(LinearFit {
        baseline,
        depth,
        chi2,
        cov_bb: s22 / det,
        cov_dd: s11 / det,
        cov_bd: s12 / det,
    })
}
