use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ComplexVector;
use crate::error::{invalid, Result};

/// Deterministic random stream.
///
/// Backed by ChaCha8. A `(seed, stream_id)` pair selects one of 2^64
/// independent keystreams, so Monte Carlo trials can each own a substream
/// without any coordination.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One CSCG sample with total variance `variance` (half per component).
    /// The caller guarantees `variance >= 0`.
    pub fn cscg(&mut self, variance: f64) -> Complex64 {
        let sd = (0.5 * variance).sqrt();
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(sd * re, sd * im)
    }

    /// Equiprobable ±1.
    pub fn sign(&mut self) -> f64 {
        if self.rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draws a length-`dim` vector with i.i.d. `CN(0, variance)` entries.
pub fn sample_cscg(stream: &mut RngStream, dim: usize, variance: f64) -> Result<ComplexVector> {
    if dim == 0 {
        return invalid("sample dimension must be at least 1");
    }
    if !(variance >= 0.0) || !variance.is_finite() {
        return invalid(format!("variance must be finite and non-negative, got {variance}"));
    }
    let v = (0..dim).map(|_| stream.cscg(variance)).collect();
    Ok(ComplexVector::from_vec_unchecked(v))
}
