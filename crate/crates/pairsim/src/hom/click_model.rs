//! Exact click probabilities for two chaotic fields on a balanced splitter.
//!
//! Every field entering the interferometer is a zero-mean Gaussian state, so
//! the no-click probability of any detector subset is a determinant over the
//! detected modes: P(no click) = 1/det(I + H N), with N the photon-number
//! matrix of the relevant output modes. Per Schmidt index the four involved
//! output modes are linear in just two input modes, and the Sylvester
//! identity collapses each determinant to 2x2:
//!
//! ```text
//! Q_c  : det = (1 + ec a/2)(1 + ec b/2) - ec^2 O a b / 4
//! Q_cd : det = (1 + e+ a/2)(1 + e+ b/2) - e-^2 O a b / 4
//! ```
//!
//! with `a`, `b` the per-mode means of the two sources, `O` the squared
//! mode overlap after the relative delay, `e+ = ec + ed`, `e- = ec - ed`.
//! The coincidence probability per gate follows as
//! `p_cd = 1 - Q_c - Q_d + Q_cd`, which reproduces the fourth-order
//! interference dip `baseline * (1 - V0 O(tau))` of two thermal fields in
//! the low-gain limit.

/// Field and detector parameters feeding one scan point.
#[derive(Debug, Clone)]
pub struct HomInputs {
    /// Mean photons per pulse per Schmidt mode at the splitter, source 1.
    pub mode_means_1: Vec<f64>,
    /// Same for source 2, in the matched mode basis.
    pub mode_means_2: Vec<f64>,
    /// Raman photons per pulse entering with source 1 / source 2.
    pub raman_1: f64,
    pub raman_2: f64,
    pub raman_modes: u32,
    /// Total detection efficiencies of the two output detectors.
    pub eta_c: f64,
    pub eta_d: f64,
    pub dark_c: f64,
    pub dark_d: f64,
}

/// Per-gate click probabilities at one delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickProbabilities {
    pub p_c: f64,
    pub p_d: f64,
    pub p_cd: f64,
}

/// Evaluate the three click probabilities at squared mode overlap
/// `overlap_sq` (O(tau), in [0, 1]).
pub fn click_probabilities(inp: &HomInputs, overlap_sq: f64) -> ClickProbabilities {
    let o2 = overlap_sq.clamp(0.0, 1.0);
    let (ec, ed) = (inp.eta_c, inp.eta_d);
    let mut q_c = 1.0f64;
    let mut q_d = 1.0f64;
    let mut q_cd = 1.0f64;

    let n = inp.mode_means_1.len().max(inp.mode_means_2.len());
    for k in 0..n {
        let a = inp.mode_means_1.get(k).copied().unwrap_or(0.0);
        let b = inp.mode_means_2.get(k).copied().unwrap_or(0.0);
        let det_c = (1.0 + ec * a / 2.0) * (1.0 + ec * b / 2.0) - ec * ec * o2 * a * b / 4.0;
        let det_d = (1.0 + ed * a / 2.0) * (1.0 + ed * b / 2.0) - ed * ed * o2 * a * b / 4.0;
        let ep = ec + ed;
        let em = ec - ed;
        let det_cd = (1.0 + ep * a / 2.0) * (1.0 + ep * b / 2.0) - em * em * o2 * a * b / 4.0;
        q_c /= det_c;
        q_d /= det_d;
        q_cd /= det_cd;
    }

    // Raman photons split on the same splitter but never interfere with the
    // FWM fields or each other: per input mode both outputs share one
    // correlated thermal mode.
    for (r, _port) in [(inp.raman_1, 0), (inp.raman_2, 1)] {
        if r <= 0.0 {
            continue;
        }
        let m = r / inp.raman_modes.max(1) as f64;
        let modes = inp.raman_modes.max(1) as i32;
        q_c /= (1.0 + ec * m / 2.0).powi(modes);
        q_d /= (1.0 + ed * m / 2.0).powi(modes);
        q_cd /= (1.0 + (ec + ed) * m / 2.0).powi(modes);
    }

    q_c *= 1.0 - inp.dark_c;
    q_d *= 1.0 - inp.dark_d;
    q_cd *= (1.0 - inp.dark_c) * (1.0 - inp.dark_d);

    let p_c = 1.0 - q_c;
    let p_d = 1.0 - q_d;
    let p_cd = (1.0 - q_c - q_d + q_cd).max(0.0);
    ClickProbabilities { p_c, p_d, p_cd }
}
