//! Channel estimators.
//!
//! All estimates are "energy-included": they estimate `√P_B·h_B`, not `h_B`,
//! because Alice never needs to separate Bob's power from his channel.

use crate::error::{invalid, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::training::{BitVector, TrainingObservation};

/// Iteration cap of the blind random-phase estimator.
pub const ILS_MAX_ITERATIONS: usize = 100;
/// Iteration cap of the combined-phase enhancement estimator.
pub const CEE_MAX_ITERATIONS: usize = 20;

/// Least-squares estimate `(1/N)·Y·b` from known ±1 training bits.
pub fn ls_estimate(y: &ComplexMatrix, bits: &BitVector) -> Result<ComplexVector> {
    if y.cols() != bits.len() {
        return invalid(format!("observation has {} slots but {} bits were given", y.cols(), bits.len()));
    }
    Ok(y.mul_real(bits.as_slice())?.scale(1.0 / bits.len() as f64))
}

/// `sgn{Re[h^H Y]}` with `sgn(0) = +1`.
fn detect_bits(y: &ComplexMatrix, h: &ComplexVector) -> Result<BitVector> {
    Ok(BitVector::from_signs(y.hermitian_left_mul(h)?.into_iter().map(|z| z.re)))
}

/// Result of the blind iterative least-squares estimator.
#[derive(Clone, Debug)]
pub struct IlsOutcome {
    pub estimate: ComplexVector,
    pub bits: BitVector,
    /// Number of channel re-estimations performed.
    pub iterations: usize,
    /// False when the iteration cap was hit before a fixed point.
    pub converged: bool,
    /// `‖Y − ĥ^(d)·(b̂^(d))^T‖_F` after each iteration `d = 1, 2, …`.
    pub residuals: Vec<f64>,
}

/// Blind joint bit detection and channel estimation on the random phase.
///
/// Alternates `b̂ = sgn{Re[ĥ^H Y_r]}` and `ĥ = (1/N_r)·Y_r·b̂` until the bit
/// decisions repeat. Both steps minimize `‖Y_r − ĥ b̂^T‖_F` over one factor, so
/// the residual never increases. The fixed point is only defined up to a
/// global sign; starting from a good initial estimate selects the right one.
pub fn ils_estimate(y_r: &ComplexMatrix, init: &ComplexVector) -> Result<IlsOutcome> {
    if init.len() != y_r.rows() {
        return invalid(format!("initial estimate has length {}, observation has {} rows", init.len(), y_r.rows()));
    }
    if init.norm_sqr() == 0.0 {
        return invalid("ILS needs a nonzero initial channel estimate");
    }
    let n = y_r.cols() as f64;
    let mut h = init.clone();
    let mut prev: Option<BitVector> = None;
    let mut residuals = Vec::new();
    let mut converged = false;

    loop {
        let bits = detect_bits(y_r, &h)?;
        if prev.as_ref() == Some(&bits) {
            converged = true;
            break;
        }
        if residuals.len() == ILS_MAX_ITERATIONS {
            break;
        }
        h = y_r.mul_real(bits.as_slice())?.scale(1.0 / n);
        let r = y_r.rank_one_residual(&h, bits.as_slice())?;
        debug_assert!(
            residuals.last().is_none_or(|&last| r <= last * (1.0 + 1e-12) + 1e-300),
            "ILS residual increased: {residuals:?} -> {r}"
        );
        residuals.push(r);
        prev = Some(bits);
    }

    Ok(IlsOutcome {
        estimate: h,
        bits: prev.expect("at least one iteration runs"),
        iterations: residuals.len(),
        converged,
        residuals,
    })
}

#[derive(Clone, Debug)]
pub struct CeeOutcome {
    /// Combined-phase estimate `ĥ_Bc`.
    pub estimate: ComplexVector,
    pub random_bits: BitVector,
    pub iterations: usize,
    pub converged: bool,
}

/// Channel estimation enhancement: re-detect the random bits with the current
/// estimate, then run LS over both phases with `[b_p; b̂_r]`, until the
/// detected random bits repeat. The known pilots pin the sign.
pub fn cee_estimate(
    h_bp: &ComplexVector,
    y_p: &ComplexMatrix,
    y_r: &ComplexMatrix,
    b_p: &BitVector,
) -> Result<CeeOutcome> {
    if y_p.rows() != y_r.rows() || h_bp.len() != y_p.rows() {
        return invalid(format!(
            "inconsistent antenna counts: estimate {}, Y_p {}, Y_r {}",
            h_bp.len(),
            y_p.rows(),
            y_r.rows()
        ));
    }
    if y_p.cols() != b_p.len() {
        return invalid(format!("Y_p has {} slots but {} pilot bits were given", y_p.cols(), b_p.len()));
    }
    if h_bp.norm_sqr() == 0.0 {
        return invalid("CEE needs a nonzero initial channel estimate");
    }
    let total = (y_p.cols() + y_r.cols()) as f64;
    let pilot_part = y_p.mul_real(b_p.as_slice())?;
    let mut h = h_bp.clone();
    let mut prev: Option<BitVector> = None;
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let bits = detect_bits(y_r, &h)?;
        if prev.as_ref() == Some(&bits) {
            converged = true;
            break;
        }
        if iterations == CEE_MAX_ITERATIONS {
            break;
        }
        h = pilot_part.try_add(&y_r.mul_real(bits.as_slice())?)?.scale(1.0 / total);
        iterations += 1;
        prev = Some(bits);
    }

    Ok(CeeOutcome { estimate: h, random_bits: prev.expect("at least one iteration runs"), iterations, converged })
}

/// Direction error `‖h/‖h‖ − ĥ/‖ĥ‖‖²`, in `[0, 4]`.
pub fn normalized_mse(h_true: &ComplexVector, h_est: &ComplexVector) -> Result<f64> {
    let a = h_true.normalized()?;
    let b = h_est.normalized()?;
    a.distance_sqr(&b)
}

/// How `ĥ_Br` is obtained from the random phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RandomPhaseEstimator {
    /// LS with Bob's true random bits: the idealized estimate the closed-form
    /// detection analysis assumes.
    KnownBits,
    /// Blind ILS initialized from the pilot-phase estimate.
    #[default]
    Ils,
}

/// Pilot- and random-phase estimates of the legitimate channel.
#[derive(Clone, Debug)]
pub struct EstimateSet {
    pub h_bp: ComplexVector,
    pub h_br: ComplexVector,
    pub b_r_hat: BitVector,
    pub iterations: usize,
}

/// Runs LS on the pilot phase and the chosen estimator on the random phase.
///
/// ILS output is sign-aligned to the pilot estimate: the branch `s ∈ {±1}`
/// minimizing `‖ĥ_Bp − s·ĥ_Br‖²` is kept (ties keep `+1`), and the detected
/// bits are flipped with it.
pub fn estimate_phases(obs: &TrainingObservation, estimator: RandomPhaseEstimator) -> Result<EstimateSet> {
    let h_bp = ls_estimate(&obs.y_p, &obs.b_p)?;
    match estimator {
        RandomPhaseEstimator::KnownBits => {
            let h_br = ls_estimate(&obs.y_r, &obs.b_r)?;
            Ok(EstimateSet { h_bp, h_br, b_r_hat: obs.b_r.clone(), iterations: 1 })
        }
        RandomPhaseEstimator::Ils => {
            let out = ils_estimate(&obs.y_r, &h_bp)?;
            let aligned = crate::numerics::hermitian_inner(&h_bp, &out.estimate)?.re >= 0.0;
            let (h_br, b_r_hat) = if aligned {
                (out.estimate, out.bits)
            } else {
                (out.estimate.scale(-1.0), out.bits.negated())
            };
            Ok(EstimateSet { h_bp, h_br, b_r_hat, iterations: out.iterations })
        }
    }
}
