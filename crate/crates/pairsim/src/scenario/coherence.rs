//! Coherence scenarios: the headline single-setting g2 measurement and the
//! g2-versus-bandwidth sweep.

use std::fmt::Write as _;

use crate::config::{ExperimentConfig, Scenario};
use crate::counting::{estimate_g2, singles_rate};
use crate::modes::measured_band_analysis;
use crate::rng::block_count;
use crate::sampler::{derive_source_state, run_split_stream};
use crate::table::{Cell, Table};

use super::{ctx_counting, ctx_modes, ctx_sampler, OutputSink, RunError};

pub(crate) fn single_g2(cfg: &ExperimentConfig, sink: &mut OutputSink) -> Result<(), RunError> {
    let sc = Scenario::SingleG2;
    let pump = cfg.pump.at_power(cfg.single_g2.power_mw);
    let fiber = cfg.fiber.to_spec();
    let filter = cfg.filters.signal_spec();
    let (_jsa, schmidt, pred) =
        measured_band_analysis(&pump, &fiber, &filter, cfg.grid.n_points).map_err(ctx_modes(sc))?;
    let state = derive_source_state(
        &pump,
        &schmidt,
        cfg.source.calib(),
        cfg.source.raman_mode_count,
    )
    .map_err(ctx_sampler(sc))?;
    let det = cfg.detector.to_spec();
    let (s1, s2) = run_split_stream(&state, &det, &det, cfg.gates, cfg.master_seed, 0, 0.5);
    let result = estimate_g2(&s1, &s2).map_err(ctx_counting(sc))?;
    let (rate_1, _) = singles_rate(&s1).map_err(ctx_counting(sc))?;
    let (rate_2, _) = singles_rate(&s2).map_err(ctx_counting(sc))?;

    let mut table = Table::new(vec![
        "mode_number_k",
        "g2_predicted",
        "g2_measured",
        "g2_error",
        "true_coinc",
        "accidental_coinc",
        "gates_used",
        "singles_rate_1",
        "singles_rate_2",
    ]);
    table
        .push(vec![
            Cell::Real(pred.mode_number),
            Cell::Real(pred.g2),
            Cell::Real(result.g2),
            Cell::Real(result.g2_error),
            Cell::Int(result.true_coinc as i64),
            Cell::Int(result.accidental_coinc as i64),
            Cell::Int(result.gates_used as i64),
            Cell::Real(rate_1),
            Cell::Real(rate_2),
        ])
        .expect("fixed-width row");
    sink.csv("single_g2.csv", &table)?;

    let mut report = String::new();
    let _ = writeln!(report, "g2 measurement report");
    let _ = writeln!(report, "=====================");
    let _ = writeln!(
        report,
        "pump: {} nm, FWHM {} nm, average power {} mW",
        pump.center_wavelength_nm, pump.fwhm_nm, pump.average_power_mw
    );
    let _ = writeln!(
        report,
        "signal filter: {} nm FWHM at {} nm (bandwidth ratio {:.4})",
        filter.fwhm_nm,
        filter.center_wavelength_nm,
        filter.fwhm_nm / pump.fwhm_nm
    );
    let _ = writeln!(report, "schmidt mode number K = {:.4}", pred.mode_number);
    let _ = writeln!(report, "predicted g2 = {:.4}", pred.g2);
    let _ = writeln!(
        report,
        "predicted two-source HOM visibility = {:.4}",
        pred.hom_visibility
    );
    let _ = writeln!(
        report,
        "measured g2 = {:.4} +- {:.4}",
        result.g2, result.g2_error
    );
    let _ = writeln!(
        report,
        "coincidences: true {} / accidental {} over {} live gate pairs",
        result.true_coinc, result.accidental_coinc, result.gates_used
    );
    let _ = writeln!(
        report,
        "singles rates per live gate: {:.6} / {:.6}",
        rate_1, rate_2
    );
    let _ = writeln!(report, "gates examined: {}", cfg.gates);
    sink.text("g2_report.txt", &report)?;

    if cfg.single_g2.export_clicks {
        sink.csv("clicks_bs1.csv", &s1.to_table())?;
        sink.csv("clicks_bs2.csv", &s2.to_table())?;
    }
    Ok(())
}

pub(crate) fn g2_vs_bandwidth(
    cfg: &ExperimentConfig,
    sink: &mut OutputSink,
) -> Result<(), RunError> {
    let sc = Scenario::G2VsBandwidth;
    let pump = cfg.pump.at_power(cfg.g2_sweep.power_mw);
    let fiber = cfg.fiber.to_spec();
    let det = cfg.detector.to_spec();

    let mut predictions = Table::new(vec![
        "dlam_s_nm",
        "dlam_p_nm",
        "ratio",
        "k",
        "g2_predicted",
        "v_predicted",
    ]);
    let mut measured = Table::new(vec![
        "ratio",
        "g2_measured",
        "g2_error",
        "g2_predicted",
        "true_coinc",
        "accidental_coinc",
    ]);

    let blocks_per_ratio = block_count(cfg.g2_sweep.gates_per_ratio);
    for (i, &ratio) in cfg.g2_sweep.ratios.iter().enumerate() {
        let fwhm_nm = ratio * pump.fwhm_nm;
        let filter = cfg.filters.signal_spec_with_fwhm(fwhm_nm);
        let (_jsa, schmidt, pred) =
            measured_band_analysis(&pump, &fiber, &filter, cfg.grid.n_points)
                .map_err(ctx_modes(sc))?;
        predictions
            .push(vec![
                Cell::Real(fwhm_nm),
                Cell::Real(pump.fwhm_nm),
                Cell::Real(ratio),
                Cell::Real(pred.mode_number),
                Cell::Real(pred.g2),
                Cell::Real(pred.hom_visibility),
            ])
            .expect("fixed-width row");

        let state = derive_source_state(
            &pump,
            &schmidt,
            cfg.source.calib(),
            cfg.source.raman_mode_count,
        )
        .map_err(ctx_sampler(sc))?;
        let (s1, s2) = run_split_stream(
            &state,
            &det,
            &det,
            cfg.g2_sweep.gates_per_ratio,
            cfg.master_seed,
            i as u64 * blocks_per_ratio,
            0.5,
        );
        let result = estimate_g2(&s1, &s2).map_err(ctx_counting(sc))?;
        measured
            .push(vec![
                Cell::Real(ratio),
                Cell::Real(result.g2),
                Cell::Real(result.g2_error),
                Cell::Real(pred.g2),
                Cell::Int(result.true_coinc as i64),
                Cell::Int(result.accidental_coinc as i64),
            ])
            .expect("fixed-width row");
    }

    sink.csv("bandwidth_predictions.csv", &predictions)?;
    sink.csv("bandwidth_measured.csv", &measured)?;
    Ok(())
}
