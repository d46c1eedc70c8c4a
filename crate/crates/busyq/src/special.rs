//! Log-space helpers: stable sums, factorials and binomials via log-gamma,
//! and rendering of log-magnitude values in scientific notation.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// ln(n!) through the log-gamma function.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln C(n, k) through log-gamma, overflow-free for any order.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln(e^x - 1), stable across the whole range of x > 0.
pub fn ln_expm1(x: f64) -> f64 {
    if x > 34.0 {
        // ln(e^x - 1) = x + ln(1 - e^{-x})
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// ln(1 - e^{-x}) for x > 0, stable for both tiny and large x.
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// log(sum of exp(terms)) without overflow; terms may be -inf (skipped).
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms.iter().map(|&t| (t - m).exp()).sum();
    m + s.ln()
}

/// A positive value rendered as mantissa x 10^exp10, derived from its natural
/// log. Exact even when the value itself overflows f64.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SciValue {
    pub mantissa: f64,
    pub exp10: i32,
}

impl SciValue {
    pub fn from_ln(ln_value: f64) -> SciValue {
        if ln_value == f64::NEG_INFINITY {
            return SciValue { mantissa: 0.0, exp10: 0 };
        }
        let l10 = ln_value / std::f64::consts::LN_10;
        let mut exp10 = l10.floor() as i32;
        let mut mantissa = 10f64.powf(l10 - exp10 as f64);
        // guard the mantissa rounding up to exactly 10
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exp10 += 1;
        }
        SciValue { mantissa, exp10 }
    }

    /// Value as f64; +inf when out of range.
    pub fn to_f64(self) -> f64 {
        self.mantissa * 10f64.powi(self.exp10)
    }
}

impl std::fmt::Display for SciValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.7}e{}", self.mantissa, self.exp10)
    }
}

/// Relative difference |a/b - 1| computed from natural logs of positive a, b.
pub fn rel_err_from_ln(ln_a: f64, ln_b: f64) -> f64 {
    ((ln_a - ln_b).exp() - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_matches_exact_values() {
        assert!((ln_factorial(0)).abs() < 1e-14);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-12);
        assert!((ln_factorial(20) - 2.432902008176640e18f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn binomial_small_cases() {
        assert!((ln_binomial(8, 3) - 56f64.ln()).abs() < 1e-12);
        assert!((ln_binomial(8, 0)).abs() < 1e-12);
    }

    #[test]
    fn ln_expm1_both_branches() {
        assert!((ln_expm1(0.5) - 0.5f64.exp_m1().ln()).abs() < 1e-14);
        // large branch: ln(e^100 - 1) = 100 + ln(1 - e^-100) = 100 - ~3.7e-44
        assert!((ln_expm1(100.0) - 100.0).abs() < 1e-12);
        // the two branch formulas agree at the switch point
        let x = 34.0f64;
        let small_branch = x.exp_m1().ln();
        let large_branch = x + (-(-x).exp()).ln_1p();
        assert!((small_branch - large_branch).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let terms = [1.0f64, 2.0, 3.0];
        let direct: f64 = terms.iter().map(|t| t.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&terms) - direct).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn sci_rendering_beyond_float_range() {
        let v = SciValue::from_ln(352.041106 * std::f64::consts::LN_10);
        assert_eq!(v.exp10, 352);
        assert!((v.mantissa - 1.099).abs() < 0.01);
        let one = SciValue::from_ln(0.0);
        assert_eq!(one.exp10, 0);
        assert!((one.mantissa - 1.0).abs() < 1e-12);
    }
}
