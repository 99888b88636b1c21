//! Chi-square law with an even number `2M` of degrees of freedom.
//!
//! For even DOF the regularized incomplete gamma function has the finite
//! Poisson-sum form
//!
//! ```text
//! F(x) = 1 − e^{−x/2} Σ_{k=0}^{M−1} (x/2)^k / k!
//! ```
//!
//! which is exact and needs no special-function library. The tail sum is
//! evaluated in log space so large arguments underflow gracefully to 0.

use crate::error::{invalid, Result};

/// Absolute probability tolerance of [`chi2_even_quantile`].
pub const QUANTILE_TOLERANCE: f64 = 1e-12;

fn check_dof(dof_half: usize) -> Result<()> {
    if dof_half == 0 {
        return invalid("chi-square needs dof_half >= 1");
    }
    Ok(())
}

/// Survival function `1 − F(x)` of χ²_{2M}, computed directly so small tail
/// probabilities keep full relative precision.
pub fn chi2_even_sf(dof_half: usize, x: f64) -> Result<f64> {
    check_dof(dof_half)?;
    if x.is_nan() || x < 0.0 {
        return invalid(format!("chi-square argument must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let y = 0.5 * x;
    let ln_y = y.ln();
    let mut ln_term = -y;
    let mut sum = ln_term.exp();
    for k in 1..dof_half {
        ln_term += ln_y - (k as f64).ln();
        sum += ln_term.exp();
    }
    Ok(sum.min(1.0))
}

/// CDF of χ²_{2M} at `x`.
pub fn chi2_even_cdf(dof_half: usize, x: f64) -> Result<f64> {
    Ok(1.0 - chi2_even_sf(dof_half, x)?)
}

/// Inverse CDF of χ²_{2M}: returns `x` with `|F(x) − p| ≤ 1e-12`.
///
/// Brackets by doubling from the mean, then bisects on the closed-form CDF.
pub fn chi2_even_quantile(dof_half: usize, p: f64) -> Result<f64> {
    check_dof(dof_half)?;
    if !(0.0..1.0).contains(&p) {
        return invalid(format!("quantile probability must lie in [0, 1), got {p}"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let cdf = |x: f64| 1.0 - chi2_even_sf(dof_half, x).expect("validated arguments");

    let mut lo = 0.0;
    let mut hi = 2.0 * dof_half as f64;
    while cdf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = cdf(mid);
        if (f - p).abs() <= 0.25 * QUANTILE_TOLERANCE {
            return Ok(mid);
        }
        if f < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Interval collapsed to adjacent floats; take the closer endpoint.
    Ok(if (cdf(lo) - p).abs() <= (cdf(hi) - p).abs() { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Regularized lower incomplete gamma P(M, y) by its power series,
    /// summed until the terms stop contributing.
    fn lower_gamma_series(m: usize, x: f64) -> f64 {
        let y = 0.5 * x;
        if y == 0.0 {
            return 0.0;
        }
        let a = m as f64;
        let ln_gamma_a: f64 = (1..m).map(|k| (k as f64).ln()).sum();
        let mut term = 1.0 / a;
        let mut sum = term;
        for k in 1..2000 {
            term *= y / (a + k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        (a * y.ln() - y - ln_gamma_a).exp() * sum
    }

    fn chi2_density(m: usize, t: f64) -> f64 {
        if t <= 0.0 {
            return if m == 1 { 0.5 } else { 0.0 };
        }
        let ln_fact: f64 = (1..m).map(|k| (k as f64).ln()).sum();
        ((m as f64 - 1.0) * t.ln() - 0.5 * t - m as f64 * 2f64.ln() - ln_fact).exp()
    }

    #[allow(clippy::too_many_arguments)]
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1)
    }

    fn integrated_cdf(m: usize, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let f = |t: f64| chi2_density(m, t);
        simpson(&f, 0.0, x, f(0.0), f(0.5 * x), f(x), 1e-14, 50)
    }

    /// Bisection on the series oracle, independent of the closed form.
    fn oracle_quantile(m: usize, p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 200.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lower_gamma_series(m, mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(chi2_even_cdf(1, 0.0).unwrap(), 0.0);
        assert!((chi2_even_cdf(1, 2.0 * 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        let f = chi2_even_cdf(4, 20.0902).unwrap();
        assert!((f - 0.99).abs() < 1e-4, "{f}");
        assert!((f - lower_gamma_series(4, 20.0902)).abs() < 1e-12);
    }

    #[test]
    fn cdf_rejects_negative() {
        assert!(chi2_even_cdf(2, -1.0).is_err());
        assert!(chi2_even_cdf(0, 1.0).is_err());
        assert_eq!(chi2_even_cdf(3, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(chi2_even_quantile(7, 0.0).unwrap(), 0.0);
        let q99 = chi2_even_quantile(4, 0.99).unwrap();
        let q999 = chi2_even_quantile(4, 0.999).unwrap();
        assert!((q99 - oracle_quantile(4, 0.99)).abs() < 1e-8);
        assert!((q999 - oracle_quantile(4, 0.999)).abs() < 1e-8);
        // Frozen from the bisection oracle above.
        assert!((q99 - 20.090235).abs() < 1e-5, "{q99}");
        assert!((q999 - 26.124482).abs() < 1e-5, "{q999}");
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        assert!(chi2_even_quantile(4, 1.0).is_err());
        assert!(chi2_even_quantile(4, -0.1).is_err());
        assert!(chi2_even_quantile(4, f64::NAN).is_err());
    }

    #[test]
    fn quantile_round_trip_grid() {
        for m in 1..=16 {
            for i in 1..=999 {
                let p = i as f64 / 1000.0;
                let x = chi2_even_quantile(m, p).unwrap();
                let back = chi2_even_cdf(m, x).unwrap();
                assert!((back - p).abs() <= QUANTILE_TOLERANCE, "M={m} p={p} F={back}");
            }
        }
    }

    #[test]
    fn cdf_is_monotone_on_grid() {
        for m in 1..=8 {
            let mut prev = 0.0;
            for i in 0..1000 {
                let f = chi2_even_cdf(m, i as f64 * 0.06).unwrap();
                assert!(f >= prev, "M={m} i={i}");
                prev = f;
            }
        }
    }

    #[test]
    fn closed_form_matches_numerical_integration() {
        for m in [1, 2, 4, 8, 16] {
            for i in 0..=120 {
                let x = i as f64 * 0.5;
                let closed = chi2_even_cdf(m, x).unwrap();
                let integrated = integrated_cdf(m, x);
                assert!((closed - integrated).abs() <= 1e-9, "M={m} x={x}: {closed} vs {integrated}");
            }
        }
    }

    #[test]
    fn closed_form_matches_series_oracle() {
        for m in [1, 3, 4, 8, 16] {
            for i in 0..=60 {
                let x = i as f64;
                let d = (chi2_even_cdf(m, x).unwrap() - lower_gamma_series(m, x)).abs();
                assert!(d < 1e-12, "M={m} x={x}: {d}");
            }
        }
    }

    #[test]
    fn huge_arguments_do_not_nan() {
        assert_eq!(chi2_even_sf(4, 1e6).unwrap(), 0.0);
        assert_eq!(chi2_even_cdf(64, 1e4).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn round_trip_random(m in 1usize..=32, p in 0.0f64..0.9999) {
            let x = chi2_even_quantile(m, p).unwrap();
            prop_assert!((chi2_even_cdf(m, x).unwrap() - p).abs() <= 1e-10);
        }

        #[test]
        fn sf_plus_cdf_is_one(m in 1usize..=32, x in 0.0f64..200.0) {
            let s = chi2_even_sf(m, x).unwrap();
            let f = chi2_even_cdf(m, x).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!((s + f - 1.0).abs() < 1e-15);
        }
    }
}
