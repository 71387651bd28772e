//! Pump-power sweeps: singles scaling (Raman + FWM split) and
//! accidental-coincidence scaling.

use std::fmt::Write as _;

use crate::config::{ExperimentConfig, Scenario};
use crate::counting::{
    coincidence_counts_with_pairs, fit_polynomial_weighted, singles_rate, FitResult,
};
use crate::modes::measured_band_analysis;
use crate::rng::block_count;
use crate::sampler::{derive_source_state, run_gated_stream};
use crate::table::{Cell, Table};

use super::{ctx_counting, ctx_fit, ctx_modes, ctx_sampler, OutputSink, RunError};

struct SweptPoint {
    power_mw: f64,
    /// Efficiency- and saturation-corrected photons per pulse in the signal
    /// channel.
    n_s: f64,
    n_s_err: f64,
    /// Accidental (adjacent-gate) coincidence rate per gate pair.
    r_ac: f64,
    r_ac_err: f64,
}

/// Shared sweep machinery: gated A/B streams at each power, singles and
/// adjacent-gate accidentals.
fn sweep(
    cfg: &ExperimentConfig,
    sc: Scenario,
    powers: &[f64],
    gates_per_point: u64,
) -> Result<Vec<SweptPoint>, RunError> {
    let fiber = cfg.fiber.to_spec();
    let filter = cfg.filters.signal_spec();
    let det = cfg.detector.to_spec();
    let eta = det.eta_total();
    // the mode structure depends on the filters, not the power
    let (_jsa, schmidt, _pred) =
        measured_band_analysis(&cfg.pump.to_spec(), &fiber, &filter, cfg.grid.n_points)
            .map_err(ctx_modes(sc))?;
    let blocks_per_point = block_count(gates_per_point);

    let mut points = Vec::with_capacity(powers.len());
    for (i, &p) in powers.iter().enumerate() {
        let pump = cfg.pump.at_power(p);
        let state = derive_source_state(
            &pump,
            &schmidt,
            cfg.source.calib(),
            cfg.source.raman_mode_count,
        )
        .map_err(ctx_sampler(sc))?;
        let (a, b) = run_gated_stream(
            &state,
            &det,
            &det,
            gates_per_point,
            cfg.master_seed,
            i as u64 * blocks_per_point,
        );
        let (rate, rate_err) = singles_rate(&a).map_err(ctx_counting(sc))?;
        // invert the click response with the dark contribution removed
        // (1 - rate = (1 - p_dark) E[(1-eta)^n]), then divide by the total
        // efficiency to get photons per pulse at the fiber
        let n_s = (-(1.0 - rate).ln() + (1.0 - det.dark_count_prob).ln()) / eta;
        let n_s_err = rate_err / ((1.0 - rate) * eta);
        let (acc, pairs) = coincidence_counts_with_pairs(&a, &b, 1).map_err(ctx_counting(sc))?;
        let r_ac = acc as f64 / pairs.max(1) as f64;
        let r_ac_err = (acc.max(1) as f64).sqrt() / pairs.max(1) as f64;
        points.push(SweptPoint {
            power_mw: p,
            n_s,
            n_s_err,
            r_ac,
            r_ac_err,
        });
    }
    Ok(points)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

fn sweep_table(points: &[SweptPoint]) -> Table {
    let mut t = Table::new(vec!["p_ave_mw", "n_s", "n_s_err", "r_ac", "r_ac_err"]);
    for p in points {
        t.push(vec![
            Cell::Real(p.power_mw),
            Cell::Real(p.n_s),
            Cell::Real(p.n_s_err),
            Cell::Real(p.r_ac),
            Cell::Real(p.r_ac_err),
        ])
        .expect("fixed-width row");
    }
    t
}

fn fit_table(fit: &FitResult) -> Table {
    let mut t = Table::new(vec!["power", "coefficient", "stderr"]);
    for (k, &(p, c)) in fit.coefficients.iter().enumerate() {
        t.push(vec![
            Cell::Int(p as i64),
            Cell::Real(c),
            Cell::Real(fit.std_errors[k]),
        ])
        .expect("fixed-width row");
    }
    t
}

pub(crate) fn power_sweep(cfg: &ExperimentConfig, sink: &mut OutputSink) -> Result<(), RunError> {
    let sc = Scenario::PowerSweep;
    let b = &cfg.power_sweep;
    let powers = linspace(b.min_power_mw, b.max_power_mw, b.n_points);
    let points = sweep(cfg, sc, &powers, b.gates_per_point)?;
    sink.csv("power_sweep.csv", &sweep_table(&points))?;

    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (p.power_mw, p.n_s, p.n_s_err.max(1e-12)))
        .collect();
    let fit = fit_polynomial_weighted(&data, &[1, 2], true).map_err(ctx_fit(sc))?;
    sink.csv("power_fit.csv", &fit_table(&fit))?;

    let s1 = fit.coefficient(1).unwrap_or(0.0);
    let s2 = fit.coefficient(2).unwrap_or(0.0);
    let mut report = String::new();
    let _ = writeln!(report, "signal photon-number power scaling");
    let _ = writeln!(report, "==================================");
    let _ = writeln!(report, "model: N_s = s1 P + s2 P^2");
    let _ = writeln!(report, "s1 (Raman, per mW)   = {:.6e} +- {:.2e}", s1, fit.std_errors[0]);
    let _ = writeln!(report, "s2 (FWM, per mW^2)   = {:.6e} +- {:.2e}", s2, fit.std_errors[1]);
    let _ = writeln!(report, "r_squared = {:.6}", fit.r_squared);
    let crossover = if s2 > 0.0 { s1 / s2 } else { f64::INFINITY };
    let _ = writeln!(
        report,
        "FWM overtakes Raman above {:.4} mW; quadratic dominates across the sweep top",
        crossover
    );
    sink.text("power_fit_report.txt", &report)?;
    Ok(())
}

pub(crate) fn accidental_sweep(
    cfg: &ExperimentConfig,
    sink: &mut OutputSink,
) -> Result<(), RunError> {
    let sc = Scenario::AccidentalSweep;
    let b = &cfg.accidental_sweep;
    let powers = linspace(b.min_power_mw, b.max_power_mw, b.n_points);
    let points = sweep(cfg, sc, &powers, b.gates_per_point)?;
    sink.csv("accidental_sweep.csv", &sweep_table(&points))?;

    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (p.power_mw, p.r_ac, p.r_ac_err.max(1e-15)))
        .collect();
    let fit = fit_polynomial_weighted(&data, &[2, 3, 4], true).map_err(ctx_fit(sc))?;
    sink.csv("accidental_fit.csv", &fit_table(&fit))?;

    let a = fit.coefficient(2).unwrap_or(0.0);
    let bb = fit.coefficient(3).unwrap_or(0.0);
    let c = fit.coefficient(4).unwrap_or(0.0);
    let p_top = b.max_power_mw;
    let quartic_share = quartic_share_at(&fit, p_top);
    let mut report = String::new();
    let _ = writeln!(report, "accidental-coincidence power scaling");
    let _ = writeln!(report, "====================================");
    let _ = writeln!(report, "model: R_ac = a P^2 + b P^3 + c P^4");
    let _ = writeln!(report, "a (Raman x Raman)  = {:.6e} +- {:.2e}", a, fit.std_errors[0]);
    let _ = writeln!(report, "b (Raman x FWM)    = {:.6e} +- {:.2e}", bb, fit.std_errors[1]);
    let _ = writeln!(report, "c (FWM x FWM)      = {:.6e} +- {:.2e}", c, fit.std_errors[2]);
    let _ = writeln!(report, "r_squared = {:.6}", fit.r_squared);
    let _ = writeln!(
        report,
        "quartic share of R_ac at {} mW = {:.4}",
        p_top, quartic_share
    );
    sink.text("accidental_fit_report.txt", &report)?;
    Ok(())
}

/// Fraction of the fitted polynomial carried by the quartic term at power
/// `p`; used in reports and the acceptance suite.
pub fn quartic_share_at(fit: &FitResult, p: f64) -> f64 {
    let total: f64 = fit
        .coefficients
        .iter()
        .map(|&(pow, c)| c * p.powi(pow as i32))
        .sum();
    let quartic = fit.coefficient(4).unwrap_or(0.0) * p.powi(4);
    if total > 0.0 {
        quartic / total
    } else {
        0.0
    }
}
