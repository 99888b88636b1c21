//! Closed-form average downlink SNRs under MRT on a pilot-based estimate.
//!
//! Alice learns `ĥ = √P_B h_B + √P_E h_E + n` from `N` pilots, with
//! `n ~ CN(0, σ_A²/N·I)`, and transmits along `ĥ/‖ĥ‖`. The average SNR at
//! Bob is `(P_A/σ_B²)·E{|h_B^H ĥ|²/‖ĥ‖²}`, evaluated as
//!
//! ```text
//! (P_A α_B/σ_B²) · (MNP_Bα_B + NP_Eα_E + σ_A²) / (NP_Bα_B + NP_Eα_E + σ_A²)
//! ```
//!
//! Eve's average SNR is the same expression with the roles of the two
//! terminals exchanged.

use crate::error::{invalid, Result};
use crate::training::Scenario;

/// A scenario plus the pilot length of the single-phase training model.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryPoint {
    pub scenario: Scenario,
    pub n_train: usize,
}

impl TheoryPoint {
    pub fn new(scenario: Scenario, n_train: usize) -> Result<Self> {
        let pt = Self { scenario, n_train };
        pt.validate()?;
        Ok(pt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 {
            return invalid("n_train must be at least 1");
        }
        self.scenario.validate()
    }
}

/// `(P_A α/σ²)·(MNPα + NP'α' + σ_A²)/(NPα + NP'α' + σ_A²)` where `Pα`, `α`
/// and `σ²` belong to the receiver being evaluated and `P'α'` to the other.
fn mrt_average_snr(pt: &TheoryPoint, own_energy: f64, own_alpha: f64, rx_noise: f64, other_energy: f64) -> f64 {
    let s = &pt.scenario;
    let (m, n) = (s.m_antennas() as f64, pt.n_train as f64);
    let (own, other) = (n * own_energy, n * other_energy);
    (s.p_a * own_alpha / rx_noise) * (m * own + other + s.sigma2_a) / (own + other + s.sigma2_a)
}

/// Average SNR at Bob with no spoofing (`P_E = 0`).
pub fn avg_snr_bob_no_spoof(pt: &TheoryPoint) -> f64 {
    let s = &pt.scenario;
    let ab = s.model.alpha_b();
    mrt_average_snr(pt, s.p_b * ab, ab, s.sigma2_b, 0.0)
}

/// Average SNR at Bob when Eve spoofs the pilots with power `P_E`.
pub fn avg_snr_bob_spoofed(pt: &TheoryPoint) -> f64 {
    let s = &pt.scenario;
    let ab = s.model.alpha_b();
    mrt_average_snr(pt, s.p_b * ab, ab, s.sigma2_b, s.p_e * s.model.alpha_e())
}

/// Average SNR at Eve when she spoofs the pilots with power `P_E`.
pub fn avg_snr_eve_spoofed(pt: &TheoryPoint) -> f64 {
    let s = &pt.scenario;
    let ae = s.model.alpha_e();
    mrt_average_snr(pt, s.p_e * ae, ae, s.sigma2_e, s.p_b * s.model.alpha_b())
}

/// `M²P_Bα_B² + MP_Eα_Bα_E + Mα_Bσ_A²/N`, the numerator expectation used to
/// build the Bob SNR expression.
///
/// The exact `E{|h_B^H ĥ|²}` has `M(M+1)P_Bα_B²` as its first term; the
/// extra `MP_Bα_B²` is offset elsewhere so that the final ratio is exact.
pub fn bob_gain_numerator(pt: &TheoryPoint) -> f64 {
    let s = &pt.scenario;
    let m = s.m_antennas() as f64;
    let (ab, ae) = (s.model.alpha_b(), s.model.alpha_e());
    m * m * s.p_b * ab * ab + m * s.p_e * ab * ae + m * ab * s.sigma2_a / pt.n_train as f64
}

/// `E{‖ĥ‖²} = MP_Bα_B + MP_Eα_E + Mσ_A²/N`.
pub fn bob_gain_denominator(pt: &TheoryPoint) -> f64 {
    let s = &pt.scenario;
    let m = s.m_antennas() as f64;
    m * (s.p_b * s.model.alpha_b() + s.p_e * s.model.alpha_e() + s.sigma2_a / pt.n_train as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{instantaneous_snr, mrt_beamformer};
    use crate::channel::{sample_channels, ChannelModel};
    use crate::numerics::{hermitian_inner, sample_cscg, RngStream};

    fn point(m: usize, n: usize, p_b: f64, p_e: f64) -> TheoryPoint {
        let mut s = Scenario::new(ChannelModel::new(m, 1.0, 1.0).unwrap(), n, n, p_b).unwrap();
        s.p_e = p_e;
        TheoryPoint::new(s, n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn examples() {
        assert!(rel(avg_snr_bob_no_spoof(&point(4, 100, 10.0, 0.0)), 4001.0 / 1001.0) < 1e-14);
        assert!(rel(avg_snr_bob_spoofed(&point(8, 100, 10.0, 10.0)), 9001.0 / 2001.0) < 1e-14);
        assert!(rel(avg_snr_eve_spoofed(&point(4, 100, 10.0, 1.0)), 1401.0 / 1101.0) < 1e-14);
    }

    #[test]
    fn limits() {
        let big = point(4, 100, 1e12, 0.0);
        assert!(rel(avg_snr_bob_no_spoof(&big), 4.0) < 1e-9);
        let long = point(4, 1_000_000_000, 10.0, 0.0);
        assert!(rel(avg_snr_bob_no_spoof(&long), 4.0) < 1e-9);
        let loud = point(4, 100, 10.0, 1e12);
        assert!(rel(avg_snr_bob_spoofed(&loud), 1.0) < 1e-9);
        assert!(rel(avg_snr_eve_spoofed(&loud), 4.0) < 1e-9);
        let quiet = point(4, 100, 10.0, 0.0);
        assert_eq!(avg_snr_eve_spoofed(&quiet), 1.0);
        assert_eq!(avg_snr_bob_spoofed(&quiet), avg_snr_bob_no_spoof(&quiet));
    }

    #[test]
    fn swap_symmetry() {
        let mut a = point(6, 37, 3.0, 0.7);
        a.scenario.model = ChannelModel::new(6, 0.4, 1.9).unwrap();
        a.scenario.sigma2_b = 0.3;
        a.scenario.sigma2_e = 2.5;
        a.scenario.sigma2_a = 1.7;
        a.scenario.p_a = 4.0;
        let mut b = a.clone();
        b.scenario.model = ChannelModel::new(6, 1.9, 0.4).unwrap();
        b.scenario.sigma2_b = 2.5;
        b.scenario.sigma2_e = 0.3;
        b.scenario.p_b = 0.7;
        b.scenario.p_e = 3.0;
        assert_eq!(avg_snr_eve_spoofed(&a), avg_snr_bob_spoofed(&b));
    }

    #[test]
    fn monotone_in_spoofing_power() {
        let mut prev_b = f64::INFINITY;
        let mut prev_e = 0.0;
        for k in 0..=400 {
            let p_e = 10f64.powf(-2.0 + k as f64 / 100.0);
            let pt = point(8, 100, 10.0, p_e);
            let (b, e) = (avg_snr_bob_spoofed(&pt), avg_snr_eve_spoofed(&pt));
            assert!(b < prev_b && e > prev_e, "p_e={p_e}");
            prev_b = b;
            prev_e = e;
        }
    }

    #[test]
    fn rejects_zero_training() {
        let s = point(4, 10, 1.0, 0.0).scenario;
        assert!(TheoryPoint::new(s, 0).is_err());
    }

    /// Direct Monte Carlo over `ĥ = √P_B h_B + √P_E h_E + CN(0, σ_A²/N)`.
    fn monte_carlo(pt: &TheoryPoint, trials: usize, seed: u64) -> [f64; 4] {
        let s = &pt.scenario;
        let m = s.m_antennas();
        let mut stream = RngStream::new(seed);
        let mut acc = [0.0; 4];
        for _ in 0..trials {
            let ch = sample_channels(&s.model, &mut stream);
            let noise = sample_cscg(&mut stream, m, s.sigma2_a / pt.n_train as f64).unwrap();
            let h_hat = ch
                .h_b
                .scale(s.p_b.sqrt())
                .try_add(&ch.h_e.scale(s.p_e.sqrt()))
                .unwrap()
                .try_add(&noise)
                .unwrap();
            let w = mrt_beamformer(&h_hat).unwrap();
            acc[0] += instantaneous_snr(&ch.h_b, &w, s.p_a, s.sigma2_b).unwrap();
            acc[1] += instantaneous_snr(&ch.h_e, &w, s.p_a, s.sigma2_e).unwrap();
            acc[2] += hermitian_inner(&ch.h_b, &h_hat).unwrap().norm_sqr();
            acc[3] += h_hat.norm_sqr();
        }
        acc.map(|x| x / trials as f64)
    }

    #[test]
    fn monte_carlo_agreement() {
        for (m, p_e, seed) in [(4, 1.0, 11), (8, 10.0, 12)] {
            let pt = point(m, 100, 10.0, p_e);
            let [snr_b, snr_e, num, den] = monte_carlo(&pt, 40_000, seed);
            assert!(rel(snr_b, avg_snr_bob_spoofed(&pt)) < 0.02, "M={m} bob {snr_b}");
            assert!(rel(snr_e, avg_snr_eve_spoofed(&pt)) < 0.02, "M={m} eve {snr_e}");
            assert!(rel(den, bob_gain_denominator(&pt)) < 0.02, "M={m} den {den}");
            let m_f = m as f64;
            let exact_num = bob_gain_numerator(&pt) + m_f * pt.scenario.p_b;
            assert!(rel(num, exact_num) < 0.02, "M={m} num {num} vs {exact_num}");
        }
    }
}
