//! Pilot spoofing detection for MISO wiretap links.
//!
//! A multi-antenna transmitter (Alice) learns the downlink channel to a
//! single-antenna user (Bob) from uplink training. An active eavesdropper
//! (Eve) can replay the public pilot sequence to bias that estimate towards
//! herself. This crate appends a random-bit training phase after the pilots,
//! estimates the legitimate channel once from each phase and flags spoofing
//! when the two estimates disagree by more than a calibrated threshold.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: complex vectors/matrices, seedable sampling, chi-square
//!   special functions and a small Hermitian eigensolver.
//! - [`channel`]: Rayleigh block-fading channel draws.
//! - [`training`]: pilot/random bit sequences and received training matrices.
//! - [`estimation`]: least-squares, blind iterative least-squares and the
//!   combined-phase enhancement estimator.
//! - [`detector`]: test statistic, threshold calibration and closed-form
//!   detection curves.
//! - [`beamforming`]: MRT, zero-forcing and generalized-eigenvector beams,
//!   SNR and secrecy rate.
//! - [`theory`]: closed-form average SNRs under spoofing.

// `!(x >= 0.0)` style checks are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod detector;
mod error;
pub mod estimation;
pub mod numerics;
pub mod theory;
pub mod training;

pub use error::{Error, Result};
