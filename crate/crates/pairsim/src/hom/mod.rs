//! Two-source Hong-Ou-Mandel bench: coincidence dip versus relative delay.
//!
//! Interference is evaluated at the probability level: per scan point the
//! exact Gaussian-field click probabilities come out of
//! [`click_model::click_probabilities`], and gates sample the joint click
//! outcome directly. This is exact for chaotic fields and far cheaper than
//! amplitude-level sampling.

mod click_model;
mod fit;
mod overlap;

pub use click_model::{click_probabilities, ClickProbabilities, HomInputs};
pub use fit::{extract_visibility, DipCurve, DipPoint};
pub use overlap::{mode_overlap, SignalSpectrum};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::rng::{block_count, block_rng, StreamKind, BLOCK_GATES};
use crate::sampler::{DetectorSpec, SourceState};

#[derive(Debug, Error)]
pub enum HomError {
    #[error("need at least 7 scan points, got {0}")]
    TooFewPoints(usize),
    #[error("no significant dip: V = {visibility:.4} < 2 sigma ({sigma:.4})")]
    NoDip { visibility: f64, sigma: f64 },
    #[error("scan delays are degenerate")]
    DegenerateScan,
}

/// Two independent sources interfering on a balanced splitter.
#[derive(Debug, Clone)]
pub struct HomConfig {
    pub source_1: SourceState,
    pub source_2: SourceState,
    pub detector_c: DetectorSpec,
    pub detector_d: DetectorSpec,
    /// Filtered signal spectrum, shared by both sources.
    pub spectrum: SignalSpectrum,
    pub delays_ps: Vec<f64>,
    pub gates_per_point: u64,
    /// Scalar overlap of the two Schmidt mode bases (1.0 = identical).
    pub mode_basis_overlap: f64,
}

impl HomConfig {
    fn inputs(&self) -> HomInputs {
        let m1 = self.source_1.signal_mean();
        let m2 = self.source_2.signal_mean();
        if m1 > 0.0 && m2 > 0.0 {
            let ratio = (m1 / m2).max(m2 / m1);
            if ratio > 10.0 {
                log::warn!(
                    "source intensity mismatch {ratio:.1}x; visibility will be strongly reduced"
                );
            }
        }
        HomInputs {
            mode_means_1: self.source_1.sampling_means(),
            mode_means_2: self.source_2.sampling_means(),
            raman_1: self.source_1.raman_mean_s,
            raman_2: self.source_2.raman_mean_s,
            raman_modes: self.source_1.raman_mode_count,
            eta_c: self.detector_c.eta_total(),
            eta_d: self.detector_d.eta_total(),
            dark_c: self.detector_c.dark_count_prob,
            dark_d: self.detector_d.dark_count_prob,
        }
    }

    /// Click probabilities at one delay.
    pub fn probabilities_at(&self, delay_ps: f64) -> ClickProbabilities {
        let o = self.spectrum.mode_overlap(delay_ps) * self.mode_basis_overlap;
        click_probabilities(&self.inputs(), o)
    }
}

/// Counting summary of one scan point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomPointCounts {
    /// Same-gate twofold coincidences (both live, both clicked).
    pub coincidences: u64,
    /// Adjacent-gate accidentals.
    pub accidentals: u64,
    pub singles_c: u64,
    pub singles_d: u64,
    /// Pairwise-live gate pairs at offset 0 / offset 1.
    pub live_pairs: u64,
    pub live_pairs_adjacent: u64,
    pub gates: u64,
}

/// Simulate one scan point: (coincidences, gates examined).
pub fn simulate_hom_point(
    cfg: &HomConfig,
    delay_ps: f64,
    master_seed: u64,
    point_index: u64,
) -> (u64, u64) {
    let c = simulate_hom_point_counts(cfg, delay_ps, master_seed, point_index);
    (c.coincidences, c.gates)
}

/// Full counting detail for one scan point. Gates are processed in fixed
/// blocks with per-block random streams (seeded by point and block index),
/// dead time folded sequentially across block boundaries.
pub fn simulate_hom_point_counts(
    cfg: &HomConfig,
    delay_ps: f64,
    master_seed: u64,
    point_index: u64,
) -> HomPointCounts {
    let probs = cfg.probabilities_at(delay_ps);
    let n_gates = cfg.gates_per_point;
    let blocks = block_count(n_gates);
    let block_base = point_index * blocks;
    let dead_c = cfg.detector_c.dead_gates();
    let dead_d = cfg.detector_d.dead_gates();

    // outcome regions on [0,1): [0,p_cd) both, [p_cd,p_c) c only,
    // [p_c, p_c + p_d - p_cd) d only
    let t_both = probs.p_cd;
    let t_c = probs.p_c;
    let t_d = probs.p_c + probs.p_d - probs.p_cd;

    let mut counts = HomPointCounts {
        coincidences: 0,
        accidentals: 0,
        singles_c: 0,
        singles_d: 0,
        live_pairs: 0,
        live_pairs_adjacent: 0,
        gates: n_gates,
    };
    let mut skip_c = 0u32;
    let mut skip_d = 0u32;
    let mut prev: Option<(bool, bool, bool, bool)> = None; // live_c, click_c, live_d, click_d

    const CHUNK: u64 = 64;
    let mut chunk_start = 0u64;
    while chunk_start < blocks {
        let chunk_end = (chunk_start + CHUNK).min(blocks);
        let generated: Vec<Vec<u8>> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|b| {
                let mut rng = block_rng(master_seed, StreamKind::HomStream, block_base + b);
                let lo = b * BLOCK_GATES;
                let hi = ((b + 1) * BLOCK_GATES).min(n_gates);
                (lo..hi)
                    .map(|_| {
                        let u: f64 = rng.random();
                        if u < t_both {
                            3u8
                        } else if u < t_c {
                            1
                        } else if u < t_d {
                            2
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        for block in &generated {
            for &code in block {
                let live_c = skip_c == 0;
                let live_d = skip_d == 0;
                let click_c = live_c && (code & 1) != 0;
                let click_d = live_d && (code & 2) != 0;
                if !live_c {
                    skip_c -= 1;
                } else if click_c {
                    skip_c = dead_c;
                }
                if !live_d {
                    skip_d -= 1;
                } else if click_d {
                    skip_d = dead_d;
                }
                counts.singles_c += click_c as u64;
                counts.singles_d += click_d as u64;
                if live_c && live_d {
                    counts.live_pairs += 1;
                    counts.coincidences += (click_c && click_d) as u64;
                }
                if let Some((pl_c, pc_c, _, _)) = prev {
                    if pl_c && live_d {
                        counts.live_pairs_adjacent += 1;
                        counts.accidentals += (pc_c && click_d) as u64;
                    }
                }
                prev = Some((live_c, click_c, live_d, click_d));
            }
        }
        chunk_start = chunk_end;
    }
    counts
}

/// Run the full delay scan; points are indexed in order for reproducible
/// stream derivation.
pub fn run_hom_scan(cfg: &HomConfig, master_seed: u64) -> Vec<(f64, HomPointCounts)> {
    cfg.delays_ps
        .iter()
        .enumerate()
        .map(|(i, &tau)| (tau, simulate_hom_point_counts(cfg, tau, master_seed, i as u64)))
        .collect()
}

/// Dip points (with Poisson errors) from scan counts.
pub fn dip_points(scan: &[(f64, HomPointCounts)]) -> Vec<DipPoint> {
    scan.iter()
        .map(|&(tau, c)| DipPoint {
            delay_ps: tau,
            coincidences: c.coincidences as f64,
            error: (c.coincidences as f64).sqrt().max(1.0),
        })
        .collect()
}

/// Dip points with the adjacent-gate accidentals subtracted (background
/// subtraction; errors added in quadrature).
pub fn dip_points_background_subtracted(scan: &[(f64, HomPointCounts)]) -> Vec<DipPoint> {
    scan.iter()
        .map(|&(tau, c)| {
            let signal = c.coincidences as f64 - c.accidentals as f64;
            let err = (c.coincidences as f64 + c.accidentals as f64).sqrt().max(1.0);
            DipPoint {
                delay_ps: tau,
                coincidences: signal,
                error: err,
            }
        })
        .collect()
}
