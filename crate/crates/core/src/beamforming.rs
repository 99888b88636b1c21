//! Downlink beamformers and link metrics.
//!
//! Secrecy rate for a unit-norm beam `w` is
//!
//! ```text
//! R_s(w) = [log2(1 + φ|h_B^H w|²) − log2(1 + ψ|h_E^H w|²)]⁺
//!        = [log2( w^H(I + φ h_B h_B^H)w / w^H(I + ψ h_E h_E^H)w )]⁺
//! ```
//!
//! with `φ = P_A/σ_B²` and `ψ = P_A/σ_E²`, so the secrecy-optimal beam is the
//! dominant generalized eigenvector of that pencil. Zero-forcing gives up a
//! little of Bob's gain to put an exact null on Eve, and needs no knowledge
//! of Eve's power or noise level.

use crate::error::{invalid, Error, Result};
use crate::numerics::{hermitian_eigen, hermitian_inner, Complex64, ComplexMatrix, ComplexVector};

/// Unit-norm transmit weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Beamformer(ComplexVector);

impl Beamformer {
    /// Wraps weights that are already unit-norm (within 1e-10).
    pub fn new(w: ComplexVector) -> Result<Self> {
        let n = w.norm();
        if (n - 1.0).abs() > 1e-10 {
            return invalid(format!("beamformer must have unit norm, got {n}"));
        }
        Ok(Self(w))
    }

    /// Normalizes `direction` into a beamformer.
    pub fn along(direction: &ComplexVector) -> Result<Self> {
        Ok(Self(direction.normalized()?))
    }

    pub fn weights(&self) -> &ComplexVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Maximum-ratio transmission along the estimated channel.
pub fn mrt_beamformer(h_hat: &ComplexVector) -> Result<Beamformer> {
    if h_hat.norm_sqr() == 0.0 {
        return invalid("MRT needs a nonzero channel estimate");
    }
    Beamformer::along(h_hat)
}

/// Removes the component of `v` along `u` (`u` nonzero).
fn project_out(v: &ComplexVector, u: &ComplexVector) -> Result<ComplexVector> {
    let coeff = hermitian_inner(u, v)? / u.norm_sqr();
    v.try_sub(&u.scale_complex(coeff))
}

/// Zero-forcing secure beam: `ĥ_B` projected onto the orthogonal complement of
/// `ĥ_E`, normalized.
///
/// Falls back to MRT when `‖ĥ_E‖ ≤ 1e-12` (nothing to null). Returns
/// [`Error::DegenerateGeometry`] when `ĥ_B` is numerically parallel to `ĥ_E`.
pub fn zf_beamformer(h_b_hat: &ComplexVector, h_e_hat: &ComplexVector) -> Result<Beamformer> {
    if h_b_hat.len() != h_e_hat.len() {
        return invalid(format!("channel length mismatch: {} vs {}", h_b_hat.len(), h_e_hat.len()));
    }
    let nb = h_b_hat.norm();
    if nb == 0.0 {
        return invalid("zero-forcing needs a nonzero legitimate channel");
    }
    if h_e_hat.norm() <= 1e-12 {
        return mrt_beamformer(h_b_hat);
    }
    let p = project_out(h_b_hat, h_e_hat)?;
    if p.norm() <= 1e-12 * nb {
        return Err(Error::DegenerateGeometry(
            "legitimate and eavesdropper channels are parallel; no null-steering direction".into(),
        ));
    }
    // Second pass removes the rounding residue left along ĥ_E.
    let p = project_out(&p, h_e_hat)?;
    Beamformer::along(&p)
}

/// `w^H(I + φ h_b h_b^H)w / w^H(I + ψ h_e h_e^H)w` for unit-norm `w`.
pub fn secrecy_quotient(w: &Beamformer, h_b: &ComplexVector, h_e: &ComplexVector, phi: f64, psi: f64) -> Result<f64> {
    let gb = hermitian_inner(h_b, w.weights())?.norm_sqr();
    let ge = hermitian_inner(h_e, w.weights())?.norm_sqr();
    let wn = w.weights().norm_sqr();
    Ok((wn + phi * gb) / (wn + psi * ge))
}

/// Secrecy-optimal beam: the dominant generalized eigenvector of
/// `(I + φ h_b h_b^H, I + ψ h_e h_e^H)`.
///
/// The denominator `B = I + ψ h_e h_e^H` has the closed-form inverse square
/// root `B^{-1/2} = I + (1/√(1 + ψ‖h_e‖²) − 1)·h_e h_e^H/‖h_e‖²`, which turns
/// the pencil into the Hermitian matrix `B^{-1} + φ g g^H` with `g = B^{-1/2} h_b`.
/// Its top eigenvector `v` maps back to `w ∝ B^{-1/2} v`. The phase of `w` is
/// fixed so that `h_b^H w` is real and non-negative (largest entry real
/// positive if `h_b^H w = 0`).
pub fn ged_beamformer(h_b: &ComplexVector, h_e: &ComplexVector, phi: f64, psi: f64) -> Result<Beamformer> {
    if h_b.len() != h_e.len() {
        return invalid(format!("channel length mismatch: {} vs {}", h_b.len(), h_e.len()));
    }
    for (name, x) in [("phi", phi), ("psi", psi)] {
        if !(x >= 0.0) || !x.is_finite() {
            return invalid(format!("{name} must be finite and non-negative, got {x}"));
        }
    }
    if h_b.norm_sqr() == 0.0 {
        return invalid("GED beamforming needs a nonzero legitimate channel");
    }
    let m = h_b.len();
    let ne2 = h_e.norm_sqr();
    let inv_sqrt_b = |v: &ComplexVector| -> Result<ComplexVector> {
        if ne2 == 0.0 || psi == 0.0 {
            return Ok(v.clone());
        }
        let c = 1.0 / (1.0 + psi * ne2).sqrt() - 1.0;
        let coeff = hermitian_inner(h_e, v)? * (c / ne2);
        v.try_add(&h_e.scale_complex(coeff))
    };

    let g = inv_sqrt_b(h_b)?;
    let mut c = ComplexMatrix::identity(m);
    let shrink = if ne2 == 0.0 { 0.0 } else { psi / (1.0 + psi * ne2) };
    for i in 0..m {
        for j in 0..m {
            // B^{-1} = I − ψ/(1 + ψ‖h_e‖²)·h_e h_e^H (Sherman–Morrison).
            c[(i, j)] += phi * g[i] * g[j].conj() - shrink * h_e[i] * h_e[j].conj();
        }
    }
    let eig = hermitian_eigen(&c)?;
    let w = inv_sqrt_b(eig.dominant().1)?.normalized()?;

    let proj = hermitian_inner(h_b, &w)?;
    let anchor = if proj.norm() > 1e-300 {
        proj.conj()
    } else {
        // h_b ⊥ w: make the largest entry real positive instead.
        let big = w.iter().copied().fold(Complex64::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        big.conj()
    };
    let w = w.scale_complex(anchor / anchor.norm());
    Beamformer::along(&w)
}

/// `p_tx·|h^H w|²/σ²`.
pub fn instantaneous_snr(h: &ComplexVector, w: &Beamformer, p_tx: f64, sigma2: f64) -> Result<f64> {
    if !(p_tx >= 0.0) || !(sigma2 > 0.0) {
        return invalid(format!("need p_tx >= 0 and sigma2 > 0, got {p_tx} and {sigma2}"));
    }
    Ok(p_tx * hermitian_inner(h, w.weights())?.norm_sqr() / sigma2)
}

/// `[log2(1 + snr_b) − log2(1 + snr_e)]⁺` in bit/s/Hz.
pub fn secrecy_rate(snr_b: f64, snr_e: f64) -> f64 {
    debug_assert!(snr_b >= 0.0 && snr_e >= 0.0);
    ((1.0 + snr_b).log2() - (1.0 + snr_e).log2()).max(0.0)
}

/// Phase-insensitive overlap `|⟨a, b⟩|` of two beams.
pub fn beam_overlap(a: &Beamformer, b: &Beamformer) -> Result<f64> {
    Ok(hermitian_inner(a.weights(), b.weights())?.norm())
}
