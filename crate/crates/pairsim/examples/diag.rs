// diagnostic: multimode HOM chain
use pairsim::hom::*;
use pairsim::modes::*;
use pairsim::sampler::*;
use pairsim::spectral::*;

fn main() {
    let p = PumpSpec {
        center_wavelength_nm: 1538.9, fwhm_nm: 0.9,
        pulse_shape: PulseShape::Gaussian, peak_power_w: None,
        average_power_mw: 1.0, repetition_rate_mhz: 40.0,
    };
    let fiber = FiberSpec { length_km: 0.3, zero_dispersion_nm: 1538.0, dispersion_slope: 0.075, nonlinear_coefficient: 2.0 };
    let filter = FilterSpec::gaussian(1546.9, 1.9926);
    let (jsa, schmidt, pred) = measured_band_analysis(&p, &fiber, &filter, 512).unwrap();
    println!("K = {}, V_pred = {}", pred.mode_number, pred.hom_visibility);
    println!("lams[0..5] = {:?}", &schmidt.coefficients[0..5]);
    let clean = CalibCoefficients { linear_per_mw: 0.0, quad_per_mw2: 0.1 };
    let source = derive_source_state(&p, &schmidt, clean, 10).unwrap();
    println!("sampling means = {:?}", &source.sampling_means()[0..6.min(source.sampling_means().len())]);
    let det = DetectorSpec::default();
    let spectrum = SignalSpectrum::from_jsa(&jsa);
    println!("spectrum fwhm = {}, tau_c = {}", spectrum.fwhm(), spectrum.coherence_time_ps());
    let cfg = HomConfig {
        source_1: source.clone(), source_2: source,
        detector_c: det.clone(), detector_d: det,
        spectrum: spectrum.clone(),
        delays_ps: vec![0.0, 1e6],
        gates_per_point: 10_000,
        mode_basis_overlap: 1.0,
    };
    let p0 = cfg.probabilities_at(0.0);
    let pinf = cfg.probabilities_at(1e6);
    println!("p_cd(0) = {:e}, p_cd(inf) = {:e}, V_model = {}", p0.p_cd, pinf.p_cd, 1.0 - p0.p_cd/pinf.p_cd);
    // noiseless extraction from model probabilities
    let tau_c = spectrum.coherence_time_ps();
    let pts: Vec<DipPoint> = (0..21).map(|i| {
        let t = -4.0*tau_c + 8.0*tau_c*i as f64/20.0;
        let c = cfg.probabilities_at(t).p_cd * 8.0e7;
        DipPoint { delay_ps: t, coincidences: c, error: c.sqrt().max(1.0) }
    }).collect();
    let sp = spectrum.clone();
    let curve = extract_visibility(&pts, move |t| sp.mode_overlap(t)).unwrap();
    println!("noiseless extracted V = {} +- {}", curve.visibility, curve.visibility_error);
}
