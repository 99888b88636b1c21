//! Uplink training: pilot phase followed by a random-bit phase.
//!
//! Bob sends `N_p` publicly known pilot bits and then `N_r` fresh random bits,
//! both BPSK with power `P_B`. A spoofing Eve replays the pilots with power
//! `P_E`; she can also transmit her own random bits or Gaussian noise during
//! the random phase with power `P_Er`. Alice receives `Y_p` (`M × N_p`) and
//! `Y_r` (`M × N_r`) corrupted by `CN(0, σ_A²)` noise.

use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{invalid, Result};
use crate::numerics::{Complex64, ComplexMatrix, ComplexVector, RngStream};

/// What Eve transmits while Bob sends his random bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RandomPhaseAttack {
    #[default]
    None,
    /// Independent equiprobable ±1 symbols.
    RandomBits,
    /// I.i.d. unit-variance CSCG symbols (scaled by `√P_Er`).
    Gaussian,
}

/// Full parameterization of one experiment point. Powers and variances are
/// linear.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub model: ChannelModel,
    pub n_pilot: usize,
    pub n_random: usize,
    /// Bob's training power.
    pub p_b: f64,
    /// Eve's pilot-replay power; zero means no spoofing (H₀).
    pub p_e: f64,
    /// Eve's power during the random phase, used when `random_phase_attack`
    /// is not `None`.
    pub p_er: f64,
    pub random_phase_attack: RandomPhaseAttack,
    pub sigma2_a: f64,
    pub sigma2_b: f64,
    pub sigma2_e: f64,
    /// Alice's downlink data power.
    pub p_a: f64,
}

impl Scenario {
    /// Scenario without any attack, unit noise variances and unit data power.
    pub fn new(model: ChannelModel, n_pilot: usize, n_random: usize, p_b: f64) -> Result<Self> {
        let s = Self {
            model,
            n_pilot,
            n_random,
            p_b,
            p_e: 0.0,
            p_er: 0.0,
            random_phase_attack: RandomPhaseAttack::None,
            sigma2_a: 1.0,
            sigma2_b: 1.0,
            sigma2_e: 1.0,
            p_a: 1.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pilot == 0 || self.n_random == 0 {
            return invalid(format!(
                "training lengths must be >= 1, got n_pilot={} n_random={}",
                self.n_pilot, self.n_random
            ));
        }
        for (name, p) in [("p_b", self.p_b), ("p_e", self.p_e), ("p_er", self.p_er), ("p_a", self.p_a)] {
            if !(p >= 0.0) || !p.is_finite() {
                return invalid(format!("{name} must be finite and non-negative, got {p}"));
            }
        }
        for (name, s) in [("sigma2_a", self.sigma2_a), ("sigma2_b", self.sigma2_b), ("sigma2_e", self.sigma2_e)] {
            if !(s > 0.0) || !s.is_finite() {
                return invalid(format!("{name} must be finite and positive, got {s}"));
            }
        }
        Ok(())
    }

    pub fn m_antennas(&self) -> usize {
        self.model.m_antennas()
    }

    /// True when Eve replays the pilots (hypothesis H₁).
    pub fn is_spoofed(&self) -> bool {
        self.p_e > 0.0
    }
}

/// BPSK sequence with entries in {+1, −1}.
#[derive(Clone, Debug, PartialEq)]
pub struct BitVector(Vec<f64>);

impl BitVector {
    pub fn new(bits: Vec<f64>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b != 1.0 && b != -1.0) {
            return invalid(format!("bit {i} is {} (expected +1 or -1)", bits[i]));
        }
        Ok(Self(bits))
    }

    /// Hard decision with `sgn(0) = +1`.
    pub fn from_signs(values: impl IntoIterator<Item = f64>) -> Self {
        Self(values.into_iter().map(|x| if x >= 0.0 { 1.0 } else { -1.0 }).collect())
    }

    pub fn random(n: usize, stream: &mut RngStream) -> Self {
        Self((0..n).map(|_| stream.sign()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|b| -b).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Normalized correlation `(1/N) Σ a(n)·b(n)`, in `[-1, 1]`.
    pub fn correlation(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return invalid(format!("bit vector length mismatch: {} vs {}", self.len(), other.len()));
        }
        if self.is_empty() {
            return invalid("correlation of empty bit vectors");
        }
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        Ok(dot / self.len() as f64)
    }

    /// Number of positions where the two sequences differ.
    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// The public pilot sequence. Any party holding the scenario seed can
/// regenerate it.
pub fn make_pilot_bits(n: usize, stream: &mut RngStream) -> Result<BitVector> {
    if n == 0 {
        return invalid("pilot sequence needs at least one bit");
    }
    Ok(BitVector::random(n, stream))
}

/// Received training matrices plus the ground truth that produced them.
#[derive(Clone, Debug)]
pub struct TrainingObservation {
    pub y_p: ComplexMatrix,
    pub y_r: ComplexMatrix,
    pub b_p: BitVector,
    pub b_r: BitVector,
    /// Eve's random-phase bits, present only under a `RandomBits` attack.
    pub b_er: Option<BitVector>,
    pub truth: ChannelRealization,
}

fn check_dims(scenario: &Scenario, realization: &ChannelRealization, pilots: &BitVector) -> Result<()> {
    scenario.validate()?;
    let m = scenario.m_antennas();
    if realization.h_b.len() != m || realization.h_e.len() != m {
        return invalid(format!(
            "channel dimension {}/{} does not match M={m}",
            realization.h_b.len(),
            realization.h_e.len()
        ));
    }
    if pilots.len() != scenario.n_pilot {
        return invalid(format!("{} pilot bits supplied, scenario needs {}", pilots.len(), scenario.n_pilot));
    }
    Ok(())
}

/// `Y = a·s^T + noise` where `s` is an arbitrary per-slot symbol sequence and
/// an optional second rank-one term `e·t^T` is added.
fn received(
    signal: &ComplexVector,
    symbols: &[f64],
    interference: Option<(&ComplexVector, &[Complex64])>,
    sigma2: f64,
    stream: &mut RngStream,
) -> ComplexMatrix {
    let (rows, cols) = (signal.len(), symbols.len());
    let mut y = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut z = signal[r] * symbols[c];
            if let Some((e, t)) = interference {
                z += e[r] * t[c];
            }
            y[(r, c)] = z + stream.cscg(sigma2);
        }
    }
    y
}

/// Pilot-phase received matrix alone: the single-phase model where only
/// `pilots.len()` pilot slots are sent.
pub fn synthesize_pilot_phase(
    scenario: &Scenario,
    realization: &ChannelRealization,
    pilots: &BitVector,
    stream: &mut RngStream,
) -> Result<ComplexMatrix> {
    scenario.validate()?;
    let m = scenario.m_antennas();
    if realization.h_b.len() != m || realization.h_e.len() != m {
        return invalid("channel dimension does not match scenario");
    }
    if pilots.is_empty() {
        return invalid("pilot sequence is empty");
    }
    let effective = pilot_phase_channel(scenario, realization)?;
    Ok(received(&effective, pilots.as_slice(), None, scenario.sigma2_a, stream))
}

/// `√P_B h_B + √P_E h_E`, the channel the pilots actually see.
fn pilot_phase_channel(scenario: &Scenario, realization: &ChannelRealization) -> Result<ComplexVector> {
    realization
        .h_b
        .scale(scenario.p_b.sqrt())
        .try_add(&realization.h_e.scale(scenario.p_e.sqrt()))
}

/// Draws Bob's random bits (and Eve's random-phase signal, if any) and the
/// noise, then builds `Y_p` and `Y_r`.
///
/// Stream consumption order is fixed: `b_r`, Eve's symbols, `Y_p` noise,
/// `Y_r` noise.
pub fn synthesize(
    scenario: &Scenario,
    realization: &ChannelRealization,
    pilots: &BitVector,
    stream: &mut RngStream,
) -> Result<TrainingObservation> {
    check_dims(scenario, realization, pilots)?;
    let n_r = scenario.n_random;
    let b_r = BitVector::random(n_r, stream);

    let (b_er, eve_symbols): (Option<BitVector>, Option<Vec<Complex64>>) = match scenario.random_phase_attack {
        RandomPhaseAttack::None => (None, None),
        RandomPhaseAttack::RandomBits => {
            let bits = BitVector::random(n_r, stream);
            let sym = bits.as_slice().iter().map(|&b| Complex64::new(b, 0.0)).collect();
            (Some(bits), Some(sym))
        }
        RandomPhaseAttack::Gaussian => (None, Some((0..n_r).map(|_| stream.cscg(1.0)).collect())),
    };

    let pilot_channel = pilot_phase_channel(scenario, realization)?;
    let y_p = received(&pilot_channel, pilots.as_slice(), None, scenario.sigma2_a, stream);

    let bob = realization.h_b.scale(scenario.p_b.sqrt());
    let eve = realization.h_e.scale(scenario.p_er.sqrt());
    let interference = eve_symbols.as_deref().map(|t| (&eve, t));
    let y_r = received(&bob, b_r.as_slice(), interference, scenario.sigma2_a, stream);

    Ok(TrainingObservation { y_p, y_r, b_p: pilots.clone(), b_r, b_er, truth: realization.clone() })
}
