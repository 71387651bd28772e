//! Counting pipeline: singles rates, coincidence/accidental rates, the g2
//! estimator and polynomial power-scaling fits.

mod fit;

pub use fit::{fit_polynomial, fit_polynomial_weighted, FitError, FitResult};

use thiserror::Error;

use crate::sampler::ClickStream;

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("stream has no usable gates")]
    EmptyStream,
    #[error("streams cover different gate ranges: {0} vs {1}")]
    MisalignedStreams(usize, usize),
    #[error("no accidental coincidences; cannot normalize g2")]
    ZeroAccidentals,
}

/// Coincidence/accidental summary behind a balanced splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceResult {
    pub true_coinc: u64,
    pub accidental_coinc: u64,
    /// Gate pairs where both channels were live at offset 0.
    pub gates_used: u64,
    pub rate_true: f64,
    pub rate_accidental: f64,
    /// rate_true / rate_accidental.
    pub g2: f64,
    /// One sigma: g2 sqrt(1/C_true + 1/C_acc), Poisson counts, no
    /// covariance between the two counters.
    pub g2_error: f64,
}

/// Singles rate per live gate with its binomial standard error.
pub fn singles_rate(stream: &ClickStream) -> Result<(f64, f64), CountingError> {
    let live = stream.n_live();
    if live == 0 {
        return Err(CountingError::EmptyStream);
    }
    let p = stream.n_clicks() as f64 / live as f64;
    let err = (p * (1.0 - p) / live as f64).sqrt();
    Ok((p, err))
}

/// Coincidences between `a` at gate g and `b` at gate g + offset.
///
/// Offset 0 counts true coincidences, offset 1 the adjacent-pulse
/// accidentals. An offset beyond the stream length yields zero with a
/// warning.
pub fn coincidence_counts(
    a: &ClickStream,
    b: &ClickStream,
    offset: usize,
) -> Result<u64, CountingError> {
    Ok(coincidence_counts_with_pairs(a, b, offset)?.0)
}

/// Coincidence count plus the number of pairwise-live gate pairs that were
/// eligible at this offset (the unbiased rate denominator).
pub fn coincidence_counts_with_pairs(
    a: &ClickStream,
    b: &ClickStream,
    offset: usize,
) -> Result<(u64, u64), CountingError> {
    if a.n_gates() != b.n_gates() {
        return Err(CountingError::MisalignedStreams(a.n_gates(), b.n_gates()));
    }
    let n = a.n_gates();
    if offset >= n {
        log::warn!("coincidence offset {offset} beyond stream length {n}; empty overlap");
        return Ok((0, 0));
    }
    let mut count = 0u64;
    let mut pairs = 0u64;
    for g in 0..n - offset {
        // a gate pair is used only if both channels were live
        if a.is_live(g) && b.is_live(g + offset) {
            pairs += 1;
            if a.is_click(g) && b.is_click(g + offset) {
                count += 1;
            }
        }
    }
    Ok((count, pairs))
}

/// g2 of one field measured behind a balanced splitter: ratio of the
/// same-gate coincidence rate to the adjacent-gate accidental rate.
pub fn estimate_g2(
    stream_1: &ClickStream,
    stream_2: &ClickStream,
) -> Result<CoincidenceResult, CountingError> {
    estimate_g2_with_offset(stream_1, stream_2, 1)
}

/// g2 estimator with a configurable accidental offset (diagnostics).
pub fn estimate_g2_with_offset(
    stream_1: &ClickStream,
    stream_2: &ClickStream,
    accidental_offset: usize,
) -> Result<CoincidenceResult, CountingError> {
    let (true_coinc, pairs0) = coincidence_counts_with_pairs(stream_1, stream_2, 0)?;
    let (acc, pairs1) = coincidence_counts_with_pairs(stream_1, stream_2, accidental_offset)?;
    if pairs0 == 0 {
        return Err(CountingError::EmptyStream);
    }
    if acc == 0 || pairs1 == 0 {
        return Err(CountingError::ZeroAccidentals);
    }
    let rate_true = true_coinc as f64 / pairs0 as f64;
    let rate_accidental = acc as f64 / pairs1 as f64;
    let g2 = rate_true / rate_accidental;
    let g2_error = g2 * (1.0 / true_coinc.max(1) as f64 + 1.0 / acc as f64).sqrt();
    Ok(CoincidenceResult {
        true_coinc,
        accidental_coinc: acc,
        gates_used: pairs0,
        rate_true,
        rate_accidental,
        g2,
        g2_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::SchmidtSpectrum;
    use crate::rng::{block_rng, StreamKind};
    use crate::sampler::{run_split_stream, Channel, DetectorSpec, SourceState};
    use rand::Rng;

    fn stream_of(clicks: &[bool]) -> ClickStream {
        ClickStream::from_states(Channel::A, vec![true; clicks.len()], clicks.to_vec())
    }

    #[test]
    fn zero_clicks_zero_rate() {
        let s = stream_of(&vec![false; 1000]);
        let (r, e) = singles_rate(&s).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(e, 0.0);
    }

    #[test]
    fn alternating_pattern_is_half() {
        let clicks: Vec<bool> = (0..1000).map(|g| g % 2 == 0).collect();
        let (r, _) = singles_rate(&stream_of(&clicks)).unwrap();
        assert_eq!(r, 0.5);
    }

    #[test]
    fn empty_stream_is_an_error() {
        let s = ClickStream::from_states(Channel::A, vec![], vec![]);
        assert!(matches!(singles_rate(&s), Err(CountingError::EmptyStream)));
        let dead = ClickStream::from_states(Channel::A, vec![false; 4], vec![false; 4]);
        assert!(matches!(singles_rate(&dead), Err(CountingError::EmptyStream)));
    }

    #[test]
    fn dead_gates_leave_the_denominator() {
        // click rate per live gate stays 1.0 when every live gate clicks
        let s = ClickStream::from_candidates(Channel::A, &vec![true; 80], 7);
        let (r, _) = singles_rate(&s).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn identical_streams_offset_zero_counts_clicks() {
        let clicks: Vec<bool> = (0..500).map(|g| g % 7 == 0).collect();
        let s = stream_of(&clicks);
        let c = coincidence_counts(&s, &s, 0).unwrap();
        assert_eq!(c, s.n_clicks());
    }

    #[test]
    fn independent_streams_at_offset_one() {
        // two independent Bernoulli(p) streams: offset-1 coincidences within
        // 3 sigma of N p^2
        let mut rng = block_rng(21, StreamKind::Scratch, 0);
        let n = 1_000_000usize;
        let p = 0.05f64;
        let a: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < p).collect();
        let b: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < p).collect();
        let c = coincidence_counts(&stream_of(&a), &stream_of(&b), 1).unwrap();
        let expected = n as f64 * p * p;
        let sigma = expected.sqrt();
        assert!((c as f64 - expected).abs() < 3.0 * sigma, "c = {c}");
    }

    #[test]
    fn offset_beyond_length_is_empty() {
        let s = stream_of(&[true, true, false]);
        assert_eq!(coincidence_counts(&s, &s, 10).unwrap(), 0);
    }

    #[test]
    fn misaligned_streams_rejected() {
        let a = stream_of(&[true, false]);
        let b = stream_of(&[true, false, true]);
        assert!(matches!(
            coincidence_counts(&a, &b, 0),
            Err(CountingError::MisalignedStreams(2, 3))
        ));
    }

    fn g2_of_source(spectrum: SchmidtSpectrum, mu: f64, gates: u64, seed: u64) -> CoincidenceResult {
        let state = SourceState {
            pair_mean: mu,
            schmidt: spectrum,
            raman_mean_s: 0.0,
            raman_mean_i: 0.0,
            raman_mode_count: 10,
        };
        let det = DetectorSpec::default();
        let (s1, s2) = run_split_stream(&state, &det, &det, gates, seed, 0, 0.5);
        estimate_g2(&s1, &s2).unwrap()
    }

    #[test]
    fn single_mode_thermal_g2_is_near_two() {
        let r = g2_of_source(SchmidtSpectrum::single_mode(), 0.45, 4_000_000, 31);
        assert!(
            (r.g2 - 2.0).abs() < 3.0 * r.g2_error + 0.03,
            "g2 {} +- {}",
            r.g2,
            r.g2_error
        );
    }

    #[test]
    fn two_mode_source_g2_is_near_three_halves() {
        let r = g2_of_source(SchmidtSpectrum::synthetic(vec![0.5, 0.5]), 0.45, 4_000_000, 32);
        assert!(
            (r.g2 - 1.5).abs() < 3.0 * r.g2_error + 0.03,
            "g2 {} +- {}",
            r.g2,
            r.g2_error
        );
    }

    #[test]
    fn poissonian_source_g2_is_near_one() {
        // coherent-state photon numbers: build candidate clicks directly
        // from Poisson draws through the detector formula
        let det = DetectorSpec {
            dead_time_us: 0.0,
            ..DetectorSpec::default()
        };
        let mut rng = block_rng(33, StreamKind::Scratch, 1);
        let n = 2_000_000usize;
        let lam = rand_distr::Poisson::new(0.5f64).unwrap();
        let mut c1 = Vec::with_capacity(n);
        let mut c2 = Vec::with_capacity(n);
        for _ in 0..n {
            let photons = rand_distr::Distribution::sample(&lam, &mut rng) as u32;
            let n1 = if photons == 0 {
                0
            } else {
                rand_distr::Distribution::sample(
                    &rand_distr::Binomial::new(photons as u64, 0.5).unwrap(),
                    &mut rng,
                ) as u32
            };
            c1.push(crate::sampler::detect(n1, &det, &mut rng));
            c2.push(crate::sampler::detect(photons - n1, &det, &mut rng));
        }
        let s1 = ClickStream::from_candidates(Channel::Bs1, &c1, 0);
        let s2 = ClickStream::from_candidates(Channel::Bs2, &c2, 0);
        let r = estimate_g2(&s1, &s2).unwrap();
        assert!(
            (r.g2 - 1.0).abs() < 3.0 * r.g2_error,
            "g2 {} +- {}",
            r.g2,
            r.g2_error
        );
    }

    #[test]
    fn g2_is_invariant_under_splitter_imbalance() {
        let state = SourceState {
            pair_mean: 0.45,
            schmidt: SchmidtSpectrum::single_mode(),
            raman_mean_s: 0.0,
            raman_mean_i: 0.0,
            raman_mode_count: 10,
        };
        let det = DetectorSpec::default();
        let (a1, a2) = run_split_stream(&state, &det, &det, 4_000_000, 41, 0, 0.5);
        let (b1, b2) = run_split_stream(&state, &det, &det, 4_000_000, 42, 0, 0.6);
        let ra = estimate_g2(&a1, &a2).unwrap();
        let rb = estimate_g2(&b1, &b2).unwrap();
        let combined = (ra.g2_error.powi(2) + rb.g2_error.powi(2)).sqrt();
        assert!(
            (ra.g2 - rb.g2).abs() < 3.0 * combined + 0.03,
            "50/50 {} vs 60/40 {}",
            ra.g2,
            rb.g2
        );
    }

    #[test]
    fn zero_accidentals_is_an_error() {
        let a = stream_of(&[true, false, true, false]);
        let b = stream_of(&[true, false, true, false]);
        // offset-1 pairs never coincide in this pattern
        assert!(matches!(
            estimate_g2(&a, &b),
            Err(CountingError::ZeroAccidentals)
        ));
    }
}
