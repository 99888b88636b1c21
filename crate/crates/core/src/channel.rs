//! Rayleigh block-fading MISO channels.
//!
//! Each link is `h = √α · h̄` with `h̄ ~ CN(0, I_M)`. A realization stays fixed
//! for one whole trial (uplink training and downlink data), which is also how
//! TDD reciprocity is modeled: the same vectors serve both directions.

use crate::error::{invalid, Result};
use crate::numerics::{sample_cscg, ComplexVector, RngStream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    m_antennas: usize,
    alpha_b: f64,
    alpha_e: f64,
}

impl ChannelModel {
    /// `alpha_b`/`alpha_e` are linear large-scale gains of Bob→Alice and
    /// Eve→Alice. Alice needs at least two antennas.
    pub fn new(m_antennas: usize, alpha_b: f64, alpha_e: f64) -> Result<Self> {
        if m_antennas < 2 {
            return invalid(format!("transmitter needs at least 2 antennas, got {m_antennas}"));
        }
        for (name, a) in [("alpha_b", alpha_b), ("alpha_e", alpha_e)] {
            if !(a >= 0.0) || !a.is_finite() {
                return invalid(format!("{name} must be finite and non-negative, got {a}"));
            }
        }
        Ok(Self { m_antennas, alpha_b, alpha_e })
    }

    pub fn m_antennas(&self) -> usize {
        self.m_antennas
    }

    pub fn alpha_b(&self) -> f64 {
        self.alpha_b
    }

    pub fn alpha_e(&self) -> f64 {
        self.alpha_e
    }
}

/// One draw of the legitimate (`h_b`) and eavesdropper (`h_e`) channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h_b: ComplexVector,
    pub h_e: ComplexVector,
}

impl ChannelRealization {
    pub fn m_antennas(&self) -> usize {
        self.h_b.len()
    }
}

pub fn sample_channels(model: &ChannelModel, stream: &mut RngStream) -> ChannelRealization {
    let m = model.m_antennas;
    let h_b = sample_cscg(stream, m, model.alpha_b).expect("validated model");
    let h_e = sample_cscg(stream, m, model.alpha_e).expect("validated model");
    ChannelRealization { h_b, h_e }
}
