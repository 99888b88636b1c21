//! Random-training spoofing detector.
//!
//! The statistic is `T = ‖ĥ_Bp − ĥ_Br‖²`. Without spoofing the difference is
//! pure estimation noise, `CN(0, 2C₀·I_M)` with `C₀ = ½(σ²/N_p + σ²/N_r)`, so
//! `T/C₀ ~ χ²_{2M}`. A pilot replay adds `√P_E·h_E`, which (averaged over the
//! Rayleigh channel) scales the law to `C₁ = C₀ + ½·P_E·α_E`. Thresholds come
//! straight from the χ²_{2M} quantile; no training data is needed.

use crate::error::{invalid, Result};
use crate::estimation::{estimate_phases, EstimateSet, RandomPhaseEstimator};
use crate::numerics::{chi2_even_quantile, chi2_even_sf, ComplexVector};
use crate::training::{BitVector, Scenario, TrainingObservation};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    m_antennas: usize,
    n_pilot: usize,
    n_random: usize,
    sigma2_a: f64,
    target_pfa: f64,
}

impl DetectorConfig {
    pub fn new(m_antennas: usize, n_pilot: usize, n_random: usize, sigma2_a: f64, target_pfa: f64) -> Result<Self> {
        if m_antennas == 0 || n_pilot == 0 || n_random == 0 {
            return invalid(format!("detector needs positive M, N_p, N_r; got {m_antennas}, {n_pilot}, {n_random}"));
        }
        if !(sigma2_a > 0.0) || !sigma2_a.is_finite() {
            return invalid(format!("sigma2_a must be finite and positive, got {sigma2_a}"));
        }
        if !(target_pfa > 0.0 && target_pfa < 1.0) {
            return invalid(format!("target false-alarm probability must lie in (0, 1), got {target_pfa}"));
        }
        Ok(Self { m_antennas, n_pilot, n_random, sigma2_a, target_pfa })
    }

    pub fn for_scenario(scenario: &Scenario, target_pfa: f64) -> Result<Self> {
        Self::new(scenario.m_antennas(), scenario.n_pilot, scenario.n_random, scenario.sigma2_a, target_pfa)
    }

    pub fn m_antennas(&self) -> usize {
        self.m_antennas
    }

    pub fn target_pfa(&self) -> f64 {
        self.target_pfa
    }

    /// Scale of `T` under H₀.
    pub fn c0(&self) -> f64 {
        0.5 * (self.sigma2_a / self.n_pilot as f64 + self.sigma2_a / self.n_random as f64)
    }

    /// Scale of `T` under H₁ for a given `P_E·α_E`.
    pub fn c1(&self, spoof_energy: f64) -> f64 {
        self.c0() + 0.5 * spoof_energy
    }
}

#[derive(Clone, Debug)]
pub struct DetectionOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub spoofed: bool,
    /// `ĥ_Bp − ĥ_Br`, an estimate of `√P_E·h_E`. Always filled in; only
    /// meaningful when `spoofed` is true.
    pub h_e_estimate: ComplexVector,
}

pub fn test_statistic(h_bp: &ComplexVector, h_br: &ComplexVector) -> Result<f64> {
    h_bp.distance_sqr(h_br)
}

/// `γ = C₀ · F⁻¹_{χ²_{2M}}(1 − P_fa)`.
pub fn calibrate_threshold(cfg: &DetectorConfig) -> f64 {
    cfg.c0() * chi2_even_quantile(cfg.m_antennas, 1.0 - cfg.target_pfa).expect("validated config")
}

/// Declares spoofing iff `T > γ` (a tie goes to H₀).
pub fn decide(h_bp: &ComplexVector, h_br: &ComplexVector, threshold: f64) -> Result<DetectionOutcome> {
    if !(threshold >= 0.0) {
        return invalid(format!("threshold must be non-negative, got {threshold}"));
    }
    let h_e_estimate = h_bp.try_sub(h_br)?;
    let statistic = h_e_estimate.norm_sqr();
    Ok(DetectionOutcome { statistic, threshold, spoofed: statistic > threshold, h_e_estimate })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return invalid(format!("threshold must be non-negative, got {gamma}"));
    }
    Ok(())
}

/// `P_fa = 1 − F(γ/C₀)`.
pub fn theoretical_pfa(cfg: &DetectorConfig, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    chi2_even_sf(cfg.m_antennas, gamma / cfg.c0())
}

/// `P_d = 1 − F(γ/C₁)` with `C₁ = ½(σ²/N_p + σ²/N_r + P_E·α_E)`.
pub fn theoretical_pd(cfg: &DetectorConfig, gamma: f64, spoof_energy: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(spoof_energy >= 0.0) {
        return invalid(format!("spoofing energy must be non-negative, got {spoof_energy}"));
    }
    let c1 = cfg.c1(spoof_energy);
    if c1.is_infinite() {
        return Ok(1.0);
    }
    chi2_even_sf(cfg.m_antennas, gamma / c1)
}

/// `μ = (1/N_r)·b_r^T b̂_r` and `ν = (1/N_r)·b_Er^T b̂_r`: how much the detected
/// random bits follow Bob's and Eve's random-phase sequences.
pub fn correlation_diagnostics(b_r: &BitVector, b_er: &BitVector, b_r_hat: &BitVector) -> Result<(f64, f64)> {
    Ok((b_r.correlation(b_r_hat)?, b_er.correlation(b_r_hat)?))
}

/// Estimates both phases and applies the threshold.
pub fn detect(
    obs: &TrainingObservation,
    threshold: f64,
    estimator: RandomPhaseEstimator,
) -> Result<(DetectionOutcome, EstimateSet)> {
    let est = estimate_phases(obs, estimator)?;
    let outcome = decide(&est.h_bp, &est.h_br, threshold)?;
    Ok((outcome, est))
}
