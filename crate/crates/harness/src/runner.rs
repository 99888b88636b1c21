//! Monte Carlo experiment execution.
//!
//! Every trial draws from its own ChaCha substream of the master seed, keyed
//! by `(sweep index, trial index)`, so results do not depend on scheduling.
//! Per-trial outputs are collected in trial order and reduced sequentially,
//! which makes parallel and sequential runs bit-identical.

use rayon::prelude::*;

use pilotguard_core::beamforming::{
    ged_beamformer, instantaneous_snr, mrt_beamformer, secrecy_rate, zf_beamformer, Beamformer,
};
use pilotguard_core::channel::sample_channels;
use pilotguard_core::detector::{
    calibrate_threshold, correlation_diagnostics, test_statistic, theoretical_pd, DetectorConfig,
};
use pilotguard_core::estimation::{cee_estimate, estimate_phases, ls_estimate, normalized_mse};
use pilotguard_core::numerics::{ComplexVector, RngStream};
use pilotguard_core::theory::{avg_snr_bob_no_spoof, avg_snr_bob_spoofed, avg_snr_eve_spoofed, TheoryPoint};
use pilotguard_core::training::{
    make_pilot_bits, synthesize, synthesize_pilot_phase, BitVector, RandomPhaseAttack, Scenario,
};
use pilotguard_core::Error as CoreError;

use crate::config::{ExperimentKind, ExperimentSpec, Pipeline};
use crate::error::Result;
use crate::report::ResultRow;

/// Substream reserved for the public pilot sequence.
pub const PILOT_STREAM: u64 = u64::MAX;

const TRIAL_BITS: u32 = 40;

/// Substream id of one trial: sweep index in the high bits, trial index in
/// the low 40.
pub fn substream_id(sweep_idx: usize, trial_idx: usize) -> u64 {
    assert!((trial_idx as u64) < (1 << TRIAL_BITS), "trial index {trial_idx} out of range");
    assert!((sweep_idx as u64) < (1 << (64 - TRIAL_BITS)) - 1, "sweep index {sweep_idx} out of range");
    ((sweep_idx as u64) << TRIAL_BITS) | trial_idx as u64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

struct Ctx<'a> {
    spec: &'a ExperimentSpec,
    exec: Execution,
    sweep_idx: usize,
    sweep_value: f64,
    scenario: Scenario,
    pilots: BitVector,
}

impl Ctx<'_> {
    /// Runs `f` for trial indices `range`, returning outputs in index order.
    fn trials<T, F>(&self, range: std::ops::Range<usize>, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut RngStream) -> pilotguard_core::Result<T> + Sync,
    {
        let seed = self.spec.master_seed;
        let one = |i: usize| {
            let mut stream = RngStream::substream(seed, substream_id(self.sweep_idx, i));
            f(&mut stream)
        };
        let out: pilotguard_core::Result<Vec<T>> = match self.exec {
            Execution::Parallel => range.into_par_iter().map(one).collect(),
            Execution::Sequential => range.map(one).collect(),
        };
        Ok(out?)
    }
}

/// Runs `spec` with trials spread over the rayon pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    run_experiment_with(spec, Execution::Parallel)
}

pub fn run_experiment_with(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for (sweep_idx, &sweep_value) in spec.sweep.values.iter().enumerate() {
        let scenario = spec.scenario_at(sweep_value)?;
        let mut pilot_stream = RngStream::substream(spec.master_seed, PILOT_STREAM);
        let pilots = make_pilot_bits(scenario.n_pilot, &mut pilot_stream)?;
        let ctx = Ctx { spec, exec, sweep_idx, sweep_value, scenario, pilots };
        let point = match spec.kind {
            ExperimentKind::SnrCurves => snr_curves(&ctx)?,
            ExperimentKind::Roc => roc(&ctx)?,
            ExperimentKind::PdVsN | ExperimentKind::PdVsM | ExperimentKind::PdVsPe => detection(&ctx)?,
            ExperimentKind::MseVsN => mse(&ctx)?,
            ExperimentKind::SecrecyVsPa => secrecy(&ctx)?,
            ExperimentKind::TheoryTable => theory_table(&ctx)?,
        };
        rows.extend(point);
    }
    Ok(rows)
}

fn spoof_energy(s: &Scenario) -> f64 {
    s.p_e * s.model.alpha_e()
}

/// Single-phase training (pilots only) followed by MRT on the LS estimate.
fn snr_curves(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let s = &ctx.scenario;
    let samples = ctx.trials(0..ctx.spec.trials, |stream| {
        let ch = sample_channels(&s.model, stream);
        let y = synthesize_pilot_phase(s, &ch, &ctx.pilots, stream)?;
        let w = mrt_beamformer(&ls_estimate(&y, &ctx.pilots)?)?;
        Ok((instantaneous_snr(&ch.h_b, &w, s.p_a, s.sigma2_b)?, instantaneous_snr(&ch.h_e, &w, s.p_a, s.sigma2_e)?))
    })?;
    let pt = TheoryPoint::new(s.clone(), s.n_pilot)?;
    let (snr_b, snr_e): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let bob_theory = if s.is_spoofed() { avg_snr_bob_spoofed(&pt) } else { avg_snr_bob_no_spoof(&pt) };
    Ok(vec![
        ResultRow::mean(ctx.sweep_value, "snr_b", &snr_b, Some(bob_theory)),
        ResultRow::mean(ctx.sweep_value, "snr_e", &snr_e, Some(avg_snr_eve_spoofed(&pt))),
    ])
}

/// Per-trial detector output.
struct DetectionSample {
    statistic: f64,
    mu: Option<f64>,
    nu: Option<f64>,
    iterations: usize,
}

fn detection_trials(ctx: &Ctx, scenario: &Scenario, range: std::ops::Range<usize>) -> Result<Vec<DetectionSample>> {
    let estimator = ctx.spec.pipeline.estimator();
    ctx.trials(range, |stream| {
        let ch = sample_channels(&scenario.model, stream);
        let obs = synthesize(scenario, &ch, &ctx.pilots, stream)?;
        let est = estimate_phases(&obs, estimator)?;
        let (mu, nu) = match &obs.b_er {
            Some(b_er) => {
                let (mu, nu) = correlation_diagnostics(&obs.b_r, b_er, &est.b_r_hat)?;
                (Some(mu), Some(nu))
            }
            None => (None, None),
        };
        Ok(DetectionSample { statistic: test_statistic(&est.h_bp, &est.h_br)?, mu, nu, iterations: est.iterations })
    })
}

fn exceedances(stats: &[f64], gamma: f64) -> usize {
    stats.iter().filter(|&&t| t > gamma).count()
}

/// Threshold leaving at most `⌊p·n⌋` of the sorted null statistics above it.
fn empirical_threshold(sorted_null: &[f64], pfa: f64) -> f64 {
    let n = sorted_null.len();
    let allowed = ((pfa * n as f64).floor() as usize).min(n - 1);
    sorted_null[n - 1 - allowed]
}

/// Pooled ROC: one H₀ pool (same scenario with Eve silent) and, if the
/// scenario spoofs, one H₁ pool. Every target is evaluated on the same pools.
fn roc(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let trials = ctx.spec.trials;
    let mut null = ctx.scenario.clone();
    null.p_e = 0.0;
    null.p_er = 0.0;
    null.random_phase_attack = RandomPhaseAttack::None;
    let mut h0: Vec<f64> = detection_trials(ctx, &null, 0..trials)?.into_iter().map(|d| d.statistic).collect();
    let h1: Option<Vec<f64>> = if ctx.scenario.is_spoofed() {
        Some(detection_trials(ctx, &ctx.scenario, trials..2 * trials)?.into_iter().map(|d| d.statistic).collect())
    } else {
        None
    };

    let v = ctx.sweep_value;
    let energy = spoof_energy(&ctx.scenario);
    let mut rows = Vec::new();
    for &p in &ctx.spec.pfa_targets {
        let cfg = DetectorConfig::for_scenario(&ctx.scenario, p)?;
        let gamma = calibrate_threshold(&cfg);
        rows.push(ResultRow::proportion(v, format!("pfa_empirical@{p}"), exceedances(&h0, gamma), trials, Some(p)));
        if let Some(h1) = &h1 {
            let pd = theoretical_pd(&cfg, gamma, energy)?;
            rows.push(ResultRow::proportion(v, format!("pd_calibrated@{p}"), exceedances(h1, gamma), trials, Some(pd)));
        }
    }
    if let Some(h1) = &h1 {
        h0.sort_by(f64::total_cmp);
        for &p in &ctx.spec.pfa_targets {
            let cfg = DetectorConfig::for_scenario(&ctx.scenario, p)?;
            let pd = theoretical_pd(&cfg, calibrate_threshold(&cfg), energy)?;
            let gamma = empirical_threshold(&h0, p);
            rows.push(ResultRow::proportion(v, format!("pd_roc@{p}"), exceedances(h1, gamma), trials, Some(pd)));
        }
    }
    Ok(rows)
}

/// Detection rate of the calibrated detector at each target, plus random-phase
/// diagnostics when Eve sends random bits.
fn detection(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let trials = ctx.spec.trials;
    let samples = detection_trials(ctx, &ctx.scenario, 0..trials)?;
    let stats: Vec<f64> = samples.iter().map(|d| d.statistic).collect();
    let v = ctx.sweep_value;
    let mut rows = Vec::new();
    for &p in &ctx.spec.pfa_targets {
        let cfg = DetectorConfig::for_scenario(&ctx.scenario, p)?;
        let gamma = calibrate_threshold(&cfg);
        let pd = theoretical_pd(&cfg, gamma, spoof_energy(&ctx.scenario))?;
        rows.push(ResultRow::proportion(v, format!("pd@{p}"), exceedances(&stats, gamma), trials, Some(pd)));
    }
    if ctx.spec.pipeline == Pipeline::Ils {
        let iters: Vec<f64> = samples.iter().map(|d| d.iterations as f64).collect();
        rows.push(ResultRow::mean(v, "ils_iterations", &iters, None));
    }
    if samples[0].mu.is_some() {
        let mu: Vec<f64> = samples.iter().map(|d| d.mu.expect("present").abs()).collect();
        let nu: Vec<f64> = samples.iter().map(|d| d.nu.expect("present").abs()).collect();
        let both = mu.iter().zip(&nu).filter(|(m, n)| **m > 0.9 && **n > 0.9).count();
        rows.push(ResultRow::mean(v, "mu_abs", &mu, None));
        rows.push(ResultRow::mean(v, "nu_abs", &nu, None));
        rows.push(ResultRow::proportion(v, "mu_nu_both_large", both, trials, Some(0.0)));
    }
    Ok(rows)
}

/// Direction error of pilot-only LS, full-length LS (all bits known) and CEE.
fn mse(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let s = &ctx.scenario;
    let samples = ctx.trials(0..ctx.spec.trials, |stream| {
        let ch = sample_channels(&s.model, stream);
        let obs = synthesize(s, &ch, &ctx.pilots, stream)?;
        let h_bp = ls_estimate(&obs.y_p, &obs.b_p)?;
        let h_full = ls_estimate(&obs.y_p.hconcat(&obs.y_r)?, &obs.b_p.concat(&obs.b_r))?;
        let cee = cee_estimate(&h_bp, &obs.y_p, &obs.y_r, &obs.b_p)?;
        Ok([
            normalized_mse(&ch.h_b, &h_bp)?,
            normalized_mse(&ch.h_b, &h_full)?,
            normalized_mse(&ch.h_b, &cee.estimate)?,
        ])
    })?;
    let column = |k: usize| samples.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let v = ctx.sweep_value;
    Ok(vec![
        ResultRow::mean(v, "mse_cce_np", &column(0), None),
        ResultRow::mean(v, "mse_cce_np_nr", &column(1), None),
        ResultRow::mean(v, "mse_cee", &column(2), None),
    ])
}

const SECRECY_ARMS: [&str; 5] = ["rs_mrt", "rs_ged_true", "rs_ged_est", "rs_zf_true", "rs_zf_est"];

/// Zero-forcing beam, or `None` when the channels are parallel.
fn zf_or_none(h_b: &ComplexVector, h_e: &ComplexVector) -> pilotguard_core::Result<Option<Beamformer>> {
    match zf_beamformer(h_b, h_e) {
        Ok(w) => Ok(Some(w)),
        Err(CoreError::DegenerateGeometry(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Ergodic secrecy rate of five beamformers on the same draws.
///
/// MRT uses the (possibly spoofed) pilot estimate. The estimated arms use
/// `ĥ_Br` for Bob and `ĥ_Bp − ĥ_Br` for Eve; for GED these are rescaled by
/// `1/√P_B` and `1/√P_E` to channel units. A degenerate ZF draw scores zero.
fn secrecy(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let s = &ctx.scenario;
    let estimator = ctx.spec.pipeline.estimator();
    let phi = s.p_a / s.sigma2_b;
    let psi = s.p_a / s.sigma2_e;
    let samples = ctx.trials(0..ctx.spec.trials, |stream| {
        let ch = sample_channels(&s.model, stream);
        let obs = synthesize(s, &ch, &ctx.pilots, stream)?;
        let est = estimate_phases(&obs, estimator)?;
        let h_e_hat = est.h_bp.try_sub(&est.h_br)?;
        let rate = |w: Option<Beamformer>| -> pilotguard_core::Result<f64> {
            let Some(w) = w else { return Ok(0.0) };
            Ok(secrecy_rate(
                instantaneous_snr(&ch.h_b, &w, s.p_a, s.sigma2_b)?,
                instantaneous_snr(&ch.h_e, &w, s.p_a, s.sigma2_e)?,
            ))
        };
        let unscale = |h: &ComplexVector, p: f64| if p > 0.0 { h.scale(1.0 / p.sqrt()) } else { h.clone() };
        Ok([
            rate(Some(mrt_beamformer(&est.h_bp)?))?,
            rate(Some(ged_beamformer(&ch.h_b, &ch.h_e, phi, psi)?))?,
            rate(Some(ged_beamformer(&unscale(&est.h_br, s.p_b), &unscale(&h_e_hat, s.p_e), phi, psi)?))?,
            rate(zf_or_none(&ch.h_b, &ch.h_e)?)?,
            rate(zf_or_none(&est.h_br, &h_e_hat)?)?,
        ])
    })?;
    Ok(SECRECY_ARMS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let col: Vec<f64> = samples.iter().map(|r| r[k]).collect();
            ResultRow::mean(ctx.sweep_value, *name, &col, None)
        })
        .collect())
}

/// Closed-form values only: average SNRs and, per target, the threshold and
/// detection probability.
fn theory_table(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let s = &ctx.scenario;
    let v = ctx.sweep_value;
    let pt = TheoryPoint::new(s.clone(), s.n_pilot)?;
    let mut rows = vec![
        ResultRow::theory(v, "snr_b_no_spoof", avg_snr_bob_no_spoof(&pt)),
        ResultRow::theory(v, "snr_b_spoofed", avg_snr_bob_spoofed(&pt)),
        ResultRow::theory(v, "snr_e_spoofed", avg_snr_eve_spoofed(&pt)),
    ];
    for &p in &ctx.spec.pfa_targets {
        let cfg = DetectorConfig::for_scenario(s, p)?;
        let gamma = calibrate_threshold(&cfg);
        rows.push(ResultRow::theory(v, format!("threshold@{p}"), gamma));
        rows.push(ResultRow::theory(v, format!("pd@{p}"), theoretical_pd(&cfg, gamma, spoof_energy(s))?));
    }
    Ok(rows)
}
