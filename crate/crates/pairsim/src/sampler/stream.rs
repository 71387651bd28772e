//! Gated click streams: parallel block generation, sequential dead-time
//! bookkeeping.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{block_count, block_rng, StreamKind, BLOCK_GATES};
use crate::table::{Cell, Table};

use super::{sample_multimode_thermal, sample_thermal, DetectorSpec, SourceState};

/// Detector channel labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    A,
    B,
    Bs1,
    Bs2,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Channel::A => "A",
            Channel::B => "B",
            Channel::Bs1 => "BS1",
            Channel::Bs2 => "BS2",
        };
        f.write_str(s)
    }
}

/// One gate of one channel, for export; dead gates are not represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClickRecord {
    pub gate_index: u64,
    pub channel: Channel,
    pub clicked: bool,
}

/// Click and liveness history of one detector over a gate sequence.
#[derive(Debug, Clone)]
pub struct ClickStream {
    pub channel: Channel,
    live: Vec<bool>,
    clicked: Vec<bool>,
}

impl ClickStream {
    /// Assemble from raw candidate clicks by applying the dead-time rule:
    /// after every click the detector skips `dead_gates` gates.
    pub fn from_candidates(channel: Channel, candidates: &[bool], dead_gates: u32) -> Self {
        let n = candidates.len();
        let mut live = vec![true; n];
        let mut clicked = vec![false; n];
        let mut skip = 0u32;
        for g in 0..n {
            if skip > 0 {
                live[g] = false;
                skip -= 1;
                continue;
            }
            if candidates[g] {
                clicked[g] = true;
                skip = dead_gates;
            }
        }
        ClickStream {
            channel,
            live,
            clicked,
        }
    }

    /// Directly wrap externally produced gate states (testing, CSV import).
    pub fn from_states(channel: Channel, live: Vec<bool>, clicked: Vec<bool>) -> Self {
        assert_eq!(live.len(), clicked.len());
        debug_assert!(live
            .iter()
            .zip(&clicked)
            .all(|(l, c)| *l || !*c), "clicks require live gates");
        ClickStream {
            channel,
            live,
            clicked,
        }
    }

    pub fn n_gates(&self) -> usize {
        self.live.len()
    }

    #[inline]
    pub fn is_live(&self, gate: usize) -> bool {
        self.live[gate]
    }

    #[inline]
    pub fn is_click(&self, gate: usize) -> bool {
        self.clicked[gate]
    }

    pub fn n_live(&self) -> u64 {
        self.live.iter().filter(|&&l| l).count() as u64
    }

    pub fn n_clicks(&self) -> u64 {
        self.clicked.iter().filter(|&&c| c).count() as u64
    }

    /// Records of the live gates only; dead gates are absent.
    pub fn records(&self) -> impl Iterator<Item = ClickRecord> + '_ {
        self.live.iter().enumerate().filter_map(move |(g, &l)| {
            l.then_some(ClickRecord {
                gate_index: g as u64,
                channel: self.channel,
                clicked: self.clicked[g],
            })
        })
    }

    /// CSV export: (gate_index, channel, clicked).
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["gate_index", "channel", "clicked"]);
        for r in self.records() {
            t.push(vec![
                Cell::Int(r.gate_index as i64),
                Cell::Text(r.channel.to_string()),
                Cell::Int(r.clicked as i64),
            ])
            .expect("fixed-width row");
        }
        t
    }
}

/// Per-gate candidate clicks for a two-channel wiring, before dead time.
fn generate_candidates<F>(
    n_gates: u64,
    master_seed: u64,
    kind: StreamKind,
    block_base: u64,
    per_gate: F,
) -> (Vec<bool>, Vec<bool>)
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> (bool, bool) + Sync + Send + Copy,
{
    let blocks = block_count(n_gates);
    let chunks: Vec<(Vec<bool>, Vec<bool>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut gate = per_gate;
            let mut rng = block_rng(master_seed, kind, block_base + b);
            let lo = b * BLOCK_GATES;
            let hi = ((b + 1) * BLOCK_GATES).min(n_gates);
            let mut ca = Vec::with_capacity((hi - lo) as usize);
            let mut cb = Vec::with_capacity((hi - lo) as usize);
            for _ in lo..hi {
                let (a, bc) = gate(&mut rng);
                ca.push(a);
                cb.push(bc);
            }
            (ca, cb)
        })
        .collect();
    let mut a = Vec::with_capacity(n_gates as usize);
    let mut b = Vec::with_capacity(n_gates as usize);
    for (ca, cb) in chunks {
        a.extend_from_slice(&ca);
        b.extend_from_slice(&cb);
    }
    (a, b)
}

#[inline]
fn click_from_photons(n: u32, det: &DetectorSpec, eta: f64, rng: &mut impl Rng) -> bool {
    let miss = (1.0 - det.dark_count_prob) * (1.0 - eta).powi(n as i32);
    rng.random::<f64>() >= miss
}

/// Signal band to detector A, idler band to detector B, gate by gate.
///
/// Blocks of [`BLOCK_GATES`] gates are generated in parallel from
/// independently derived random streams; the result is independent of the
/// worker count. Dead-time bookkeeping runs in a sequential pass per
/// detector. `block_base` offsets the block indices so several calls under
/// one master seed stay statistically independent.
pub fn run_gated_stream(
    state: &SourceState,
    det_a: &DetectorSpec,
    det_b: &DetectorSpec,
    n_gates: u64,
    master_seed: u64,
    block_base: u64,
) -> (ClickStream, ClickStream) {
    let means = state.sampling_means();
    let raman_s = state.raman_mean_s;
    let raman_i = state.raman_mean_i;
    let raman_modes = state.raman_mode_count;
    let eta_a = det_a.eta_total();
    let eta_b = det_b.eta_total();
    let means_ref: &[f64] = &means;
    let (ca, cb) = generate_candidates(
        n_gates,
        master_seed,
        StreamKind::PairStream,
        block_base,
        move |rng| {
            let mut pairs = 0u32;
            for &m in means_ref {
                pairs += sample_thermal(m, rng);
            }
            let ns = pairs + sample_multimode_thermal(raman_s, raman_modes, rng);
            let ni = pairs + sample_multimode_thermal(raman_i, raman_modes, rng);
            (
                click_from_photons(ns, det_a, eta_a, rng),
                click_from_photons(ni, det_b, eta_b, rng),
            )
        },
    );
    (
        ClickStream::from_candidates(Channel::A, &ca, det_a.dead_gates()),
        ClickStream::from_candidates(Channel::B, &cb, det_b.dead_gates()),
    )
}

/// Signal band split on a beam splitter onto two detectors; each photon is
/// routed independently with probability `split_ratio` to the first output.
pub fn run_split_stream(
    state: &SourceState,
    det_1: &DetectorSpec,
    det_2: &DetectorSpec,
    n_gates: u64,
    master_seed: u64,
    block_base: u64,
    split_ratio: f64,
) -> (ClickStream, ClickStream) {
    assert!((0.0..=1.0).contains(&split_ratio));
    let means = state.sampling_means();
    let raman_s = state.raman_mean_s;
    let raman_modes = state.raman_mode_count;
    let eta_1 = det_1.eta_total();
    let eta_2 = det_2.eta_total();
    let means_ref: &[f64] = &means;
    let (c1, c2) = generate_candidates(
        n_gates,
        master_seed,
        StreamKind::SplitStream,
        block_base,
        move |rng| {
            let mut n = 0u32;
            for &m in means_ref {
                n += sample_thermal(m, rng);
            }
            n += sample_multimode_thermal(raman_s, raman_modes, rng);
            let n1 = if n == 0 {
                0
            } else {
                rand_distr::Distribution::sample(
                    &rand_distr::Binomial::new(n as u64, split_ratio).expect("valid ratio"),
                    rng,
                ) as u32
            };
            let n2 = n - n1;
            (
                click_from_photons(n1, det_1, eta_1, rng),
                click_from_photons(n2, det_2, eta_2, rng),
            )
        },
    );
    (
        ClickStream::from_candidates(Channel::Bs1, &c1, det_1.dead_gates()),
        ClickStream::from_candidates(Channel::Bs2, &c2, det_2.dead_gates()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::SchmidtSpectrum;

    fn source(mu: f64) -> SourceState {
        SourceState {
            pair_mean: mu,
            schmidt: SchmidtSpectrum::single_mode(),
            raman_mean_s: 0.0,
            raman_mean_i: 0.0,
            raman_mode_count: 10,
        }
    }

    fn detector(dead_time_us: f64) -> DetectorSpec {
        DetectorSpec {
            dead_time_us,
            ..DetectorSpec::default()
        }
    }

    #[test]
    fn zero_dead_time_keeps_every_gate_live() {
        let (a, b) = run_gated_stream(
            &source(0.5),
            &detector(0.0),
            &detector(0.0),
            10_000,
            1,
            0,
        );
        assert_eq!(a.n_live(), 10_000);
        assert_eq!(b.n_live(), 10_000);
    }

    #[test]
    fn deterministic_click_every_gate_has_period_eight() {
        // candidate clicks at every gate, dead time 7 gates: click pattern
        // repeats with period 8 (1 click + 7 dead)
        let candidates = vec![true; 64];
        let s = ClickStream::from_candidates(Channel::A, &candidates, 7);
        for g in 0..64 {
            assert_eq!(s.is_click(g), g % 8 == 0, "gate {g}");
            assert_eq!(s.is_live(g), g % 8 == 0, "gate {g}");
        }
        assert_eq!(s.n_clicks(), 8);
    }

    #[test]
    fn renewal_rate_with_dead_time() {
        // p(click) = 0.01, dead time 7: clicks per total gate within 3 sigma
        // of p/(1 + 7p) (renewal process), clicks per live gate unbiased at p
        let mut det = detector(10.0); // 7 gates
        det.dark_count_prob = 0.01;
        det.efficiency = 0.0;
        let n = 1_000_000u64;
        let (a, _) = run_gated_stream(&source(0.0), &det, &detector(0.0), n, 5, 0);
        let p = 0.01f64;
        let expected_total = p / (1.0 + 7.0 * p);
        let rate_total = a.n_clicks() as f64 / n as f64;
        let sigma = (expected_total / n as f64).sqrt();
        assert!(
            (rate_total - expected_total).abs() < 3.0 * sigma,
            "rate {rate_total} expected {expected_total}"
        );
        let rate_live = a.n_clicks() as f64 / a.n_live() as f64;
        let sigma_live = (p * (1.0 - p) / a.n_live() as f64).sqrt();
        assert!((rate_live - p).abs() < 3.0 * sigma_live, "live rate {rate_live}");
    }

    #[test]
    fn identical_seeds_give_bit_identical_streams() {
        let s = source(1.0);
        let d = detector(10.0);
        let (a1, b1) = run_gated_stream(&s, &d, &d, 200_000, 99, 0);
        let (a2, b2) = run_gated_stream(&s, &d, &d, 200_000, 99, 0);
        assert_eq!(a1.clicked, a2.clicked);
        assert_eq!(b1.clicked, b2.clicked);
        assert_eq!(a1.live, a2.live);
    }

    #[test]
    fn result_is_independent_of_worker_count() {
        let s = source(1.0);
        let d = detector(10.0);
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let (a1, _) = pool1.install(|| run_gated_stream(&s, &d, &d, 300_000, 7, 0));
        let (a4, _) = pool4.install(|| run_gated_stream(&s, &d, &d, 300_000, 7, 0));
        assert_eq!(a1.clicked, a4.clicked);
    }

    #[test]
    fn pair_correlation_shows_up_in_coincidences() {
        // correlated signal/idler: same-gate double clicks far above the
        // product of singles
        let s = source(0.05);
        let d = detector(0.0);
        let n = 400_000u64;
        let (a, b) = run_gated_stream(&s, &d, &d, n, 11, 0);
        let both = (0..n as usize)
            .filter(|&g| a.is_click(g) && b.is_click(g))
            .count() as f64;
        let pa = a.n_clicks() as f64 / n as f64;
        let pb = b.n_clicks() as f64 / n as f64;
        assert!(both / n as f64 > 5.0 * pa * pb, "no pair correlation");
    }

    #[test]
    fn records_skip_dead_gates() {
        let candidates = vec![true, false, false, true, false];
        let s = ClickStream::from_candidates(Channel::Bs1, &candidates, 2);
        let recs: Vec<ClickRecord> = s.records().collect();
        // gate 0 clicks, gates 1-2 dead, gate 3 clicks, gate 4 dead
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].gate_index, 0);
        assert!(recs[0].clicked);
        assert_eq!(recs[1].gate_index, 3);
        assert!(recs[1].clicked);
        let t = s.to_table();
        assert_eq!(t.n_rows(), 2);
    }
}
