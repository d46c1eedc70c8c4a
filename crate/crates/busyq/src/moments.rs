//! Busy-period raw moments and shape statistics.
//!
//! The kernel transform C(s) = ∫₀^∞ e^{-st-λ∫₀ᵗ[1-G]} λ(1-G(t)) dt ties the
//! busy-period transform to the service law through
//! (B̄(s)-1)(C(s)-1) = λ⁻¹ s C(s). Differentiating n times at s = 0 yields a
//! recurrence for E[Bⁿ] in terms of the sign-folded derivatives
//! Dₙ = (-1)ⁿ C⁽ⁿ⁾(0) >= 0:
//!
//! E[Bⁿ] = e^ρ [ (n/λ) D_{n-1} + Σ_{p=1}^{n-1} C(n,p) E[B^{n-p}] D_p ]
//!
//! with every term nonnegative. Moments are held as natural logs: at ρ = 100
//! the eighth moment is ~10³⁵², far beyond f64 range, and must still print.

use crate::distributions::{QueueConfig, SurvivalTail};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSettings, TailBound, TailClass, TailPolicy};
use crate::special::{ln_binomial, ln_expm1, ln_factorial, ln_one_minus_exp_neg, log_sum_exp, SciValue};
use serde::{Deserialize, Serialize};

/// How a moment set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ClosedFormG1,
    ClosedFormBeta,
    /// Recurrence over the analytic deterministic-service derivatives.
    RecurrenceAnalyticC,
    /// Recurrence over quadrature derivatives.
    RecurrenceQuadratureC,
    ExponentialReference,
    MonteCarlo,
}

/// Raw busy-period moments E[B¹..B^N] in log-magnitude representation.
/// The busy period is nonnegative, so every moment is positive and the log
/// carries the full value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub lambda: f64,
    pub rho: f64,
    ln_moments: Vec<f64>,
    pub provenance: Provenance,
    /// Smallest n at which E[Bⁿ] is formally infinite (heavy-tail service);
    /// stored values from that order on are truncation-dependent effective
    /// moments.
    pub divergent_from: Option<usize>,
}

impl MomentSet {
    fn new(
        lambda: f64,
        rho: f64,
        ln_moments: Vec<f64>,
        provenance: Provenance,
        divergent_from: Option<usize>,
    ) -> MomentSet {
        MomentSet { lambda, rho, ln_moments, provenance, divergent_from }
    }

    pub fn n_max(&self) -> usize {
        self.ln_moments.len()
    }

    /// ln E[Bⁿ] for n in 1..=n_max.
    pub fn ln_moment(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.ln_moments.len(), "moment order {n} out of range");
        self.ln_moments[n - 1]
    }

    /// E[Bⁿ] as f64; +inf if the log value exceeds float range.
    pub fn moment(&self, n: usize) -> f64 {
        self.ln_moment(n).exp()
    }

    /// Scientific rendering, exact beyond f64 range.
    pub fn sci(&self, n: usize) -> SciValue {
        SciValue::from_ln(self.ln_moment(n))
    }

    pub fn is_divergent(&self, n: usize) -> bool {
        self.divergent_from.map_or(false, |k| n >= k)
    }

    /// Build from plain-space moment values (Monte Carlo estimates).
    pub fn from_linear_moments(
        lambda: f64,
        rho: f64,
        moments: &[f64],
        provenance: Provenance,
    ) -> MomentSet {
        let lns = moments.iter().map(|&m| m.ln()).collect();
        MomentSet::new(lambda, rho, lns, provenance, None)
    }
}

/// The sign-folded kernel derivatives Dₙ = (-1)ⁿ C⁽ⁿ⁾(0), n = 0..N-1.
/// All nonnegative: the defining integrand tⁿ e^{-λ∫(1-G)} λ(1-G) is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CDerivatives {
    pub d: Vec<f64>,
    pub source: CDerivativeSource,
    /// Smallest n with a divergent Dₙ integral; present only under the
    /// `TruncateAndWarn` policy, where `d[n]` holds effective values.
    pub divergent_from: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CDerivativeSource {
    AnalyticDeterministic,
    Quadrature,
}

/// Shape triple: coefficient of variation, Pearson symmetry coefficient
/// μ₃²/μ₂³ and kurtosis coefficient μ₄/μ₂². An exponential law gives
/// exactly (1, 4, 9).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeStats {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

fn check_order(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            constraint: "must be at least 1",
        });
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value: v,
            constraint: "must be a positive finite real",
        });
    }
    Ok(())
}

/// Closed-form moments of the G₁ family (β = 0):
/// E[Bⁿ] = (1 - e^{-ρ}) n! / (λ e^{-ρ})ⁿ, evaluated as
/// ln = ln(1-e^{-ρ}) + ln n! + n(ρ - ln λ). No overflow for any (ρ, n).
pub fn closed_moments_g1(lambda: f64, rho: f64, n_max: usize) -> Result<MomentSet> {
    check_positive("lambda", lambda)?;
    check_positive("rho", rho)?;
    check_order(n_max)?;
    let ln_q = ln_one_minus_exp_neg(rho);
    let lns = (1..=n_max)
        .map(|n| ln_q + ln_factorial(n) + n as f64 * (rho - lambda.ln()))
        .collect();
    Ok(MomentSet::new(lambda, rho, lns, Provenance::ClosedFormG1, None))
}

/// Closed-form moments for the constant-β family: the busy period is a
/// mixture of an atom at 0 (weight 1-w) and an exponential law with rate
/// θ = e^{-ρ}(λ+β), so E[Bⁿ] = w n!/θⁿ with w = (λ+β)(1-e^{-ρ})/λ.
/// β = -λ is the degenerate member: all moments zero, CDF ≡ 1.
pub fn closed_moments_beta(lambda: f64, rho: f64, beta: f64, n_max: usize) -> Result<MomentSet> {
    check_positive("lambda", lambda)?;
    check_positive("rho", rho)?;
    check_order(n_max)?;
    let upper = lambda / rho.exp_m1();
    if !(beta >= -lambda && beta <= upper) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            constraint: "must lie in [-lambda, lambda/(e^rho - 1)]",
        });
    }
    if beta == -lambda {
        // degenerate: zero-length busy periods
        let lns = vec![f64::NEG_INFINITY; n_max];
        return Ok(MomentSet::new(lambda, rho, lns, Provenance::ClosedFormBeta, None));
    }
    let ln_w = (lambda + beta).ln() + ln_one_minus_exp_neg(rho) - lambda.ln();
    let ln_theta = -rho + (lambda + beta).ln();
    let lns = (1..=n_max)
        .map(|n| ln_w + ln_factorial(n) - n as f64 * ln_theta)
        .collect();
    Ok(MomentSet::new(lambda, rho, lns, Provenance::ClosedFormBeta, None))
}

/// Kernel derivatives for deterministic service, via the exact recurrence
/// D₀ = 1 - e^{-ρ}, Dₙ = (n/λ) D_{n-1} - e^{-ρ} αⁿ.
pub fn c_derivatives_deterministic(lambda: f64, alpha: f64, n_max: usize) -> Result<CDerivatives> {
    check_positive("lambda", lambda)?;
    check_positive("alpha", alpha)?;
    check_order(n_max)?;
    let rho = lambda * alpha;
    let e = (-rho).exp();
    let mut d = Vec::with_capacity(n_max);
    d.push(-(-rho).exp_m1());
    for n in 1..n_max {
        let next = (n as f64 / lambda) * d[n - 1] - e * alpha.powi(n as i32);
        d.push(next);
    }
    Ok(CDerivatives { d, source: CDerivativeSource::AnalyticDeterministic, divergent_from: None })
}

/// Kernel derivatives Dₙ = ∫₀^∞ tⁿ e^{-λ∫₀ᵗ[1-G]} λ(1-G(t)) dt by adaptive
/// quadrature, n = 0..n_max-1.
///
/// Support edges are supplied as panel breakpoints. An atom of G at the
/// origin needs no special handling here: the integrand weight is 1-G, which
/// already excludes the atom. Heavy-tail service makes the integrand tail
/// behave like t^{n-θ}; orders with n-θ >= -1 are divergent and follow the
/// configured tail policy ([`TailPolicy::TruncateAndWarn`] records the
/// divergence order and keeps effective values).
pub fn c_derivatives_quadrature(
    config: &QueueConfig,
    n_max: usize,
    settings: &QuadratureSettings,
) -> Result<CDerivatives> {
    check_order(n_max)?;
    let lambda = config.lambda;
    let service = config.service.clone();
    let breakpoints = service.breakpoints();

    // a heavy tail dooms the higher derivatives before any quadrature runs;
    // under the strict policy, fail up front naming the first moment order
    // whose kernel derivative diverges
    if settings.tail_policy == TailPolicy::ErrorIfDivergent {
        if let SurvivalTail::Power { exponent } = service.survival_tail() {
            for n in 0..n_max {
                let tail_exponent = n as f64 - exponent;
                if tail_exponent >= -1.0 {
                    return Err(Error::DivergentIntegral {
                        moment_order: Some(n + 1),
                        tail_exponent,
                    });
                }
            }
        }
    }

    let mut d = Vec::with_capacity(n_max);
    let mut divergent_from = None;

    for n in 0..n_max {
        let sv = service.clone();
        let integrand = move |t: f64| {
            let s = sv.survival_unchecked(t);
            if s == 0.0 {
                return 0.0;
            }
            powi_f(t, n) * (-lambda * sv.integrated_tail_unchecked(t)).exp() * lambda * s
        };
        let result = match service.survival_tail() {
            SurvivalTail::CompactSupport { bound } => quadrature::integrate_finite_with_breakpoints(
                integrand,
                0.0,
                bound,
                &breakpoints,
                settings,
            ),
            SurvivalTail::Exponential { rate } => quadrature::integrate_semi_infinite(
                integrand,
                0.0,
                TailClass::ExponentialTail { rate, poly_degree: n as f64 },
                &breakpoints,
                settings,
            ),
            SurvivalTail::Power { exponent } => quadrature::integrate_semi_infinite(
                integrand,
                0.0,
                TailClass::PlateauTimesPowerTail { exponent: n as f64 - exponent },
                &breakpoints,
                settings,
            ),
        };
        match result {
            Ok(r) => {
                if matches!(r.truncated_tail_bound, TailBound::Divergent) && divergent_from.is_none() {
                    divergent_from = Some(n);
                }
                d.push(r.value.max(0.0));
            }
            Err(Error::DivergentIntegral { tail_exponent, .. }) => {
                // name the moment order this derivative would feed
                return Err(Error::DivergentIntegral {
                    moment_order: Some(n + 1),
                    tail_exponent,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CDerivatives { d, source: CDerivativeSource::Quadrature, divergent_from })
}

fn powi_f(t: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        t.powi(n as i32)
    }
}

/// Moment recurrence over kernel derivatives, all-positive form evaluated in
/// log space with log-sum-exp; n = 1 reduces to (e^ρ/λ) D₀ = (e^ρ-1)/λ.
/// Divergence flags propagate: E[Bⁿ] requires D_{n-1}, so the moment order
/// n is divergent as soon as any required derivative is.
pub fn moments_recurrence(
    cderivs: &CDerivatives,
    lambda: f64,
    rho: f64,
    n_max: usize,
) -> Result<MomentSet> {
    check_positive("lambda", lambda)?;
    check_positive("rho", rho)?;
    check_order(n_max)?;
    if cderivs.d.len() < n_max {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            constraint: "requires kernel derivatives D_0 .. D_{n_max-1}",
        });
    }
    let ln_d: Vec<f64> = cderivs.d.iter().map(|&v| v.ln()).collect();
    let mut ln_m = Vec::with_capacity(n_max);
    let mut terms = Vec::new();
    for n in 1..=n_max {
        terms.clear();
        terms.push((n as f64 / lambda).ln() + ln_d[n - 1]);
        for p in 1..n {
            terms.push(ln_binomial(n, p) + ln_m[n - p - 1] + ln_d[p]);
        }
        ln_m.push(rho + log_sum_exp(&terms));
    }
    let provenance = match cderivs.source {
        CDerivativeSource::AnalyticDeterministic => Provenance::RecurrenceAnalyticC,
        CDerivativeSource::Quadrature => Provenance::RecurrenceQuadratureC,
    };
    let divergent_from = cderivs.divergent_from.map(|k| k + 1);
    Ok(MomentSet::new(lambda, rho, ln_m, provenance, divergent_from))
}

/// Moments of the exponential reference law with mean μ: E[Xⁿ] = n! μⁿ.
pub fn exponential_reference_moments(mu: f64, n_max: usize) -> Result<MomentSet> {
    check_positive("mu", mu)?;
    check_order(n_max)?;
    let ln_mu = mu.ln();
    let lns = (1..=n_max).map(|n| ln_factorial(n) + n as f64 * ln_mu).collect();
    // report the (λ, ρ) of a unit-rate queue with this mean busy period:
    // mu = (e^ρ - 1)/λ with λ = 1
    let rho = mu.ln_1p();
    Ok(MomentSet::new(1.0, rho, lns, Provenance::ExponentialReference, None))
}

/// Exponential reference with mean (e^ρ - 1)/λ, the comparison column of the
/// moment tables; safe for ρ far beyond exp overflow.
pub fn exponential_reference_for(lambda: f64, rho: f64, n_max: usize) -> Result<MomentSet> {
    check_positive("lambda", lambda)?;
    check_positive("rho", rho)?;
    check_order(n_max)?;
    let ln_mu = ln_expm1(rho) - lambda.ln();
    let lns = (1..=n_max).map(|n| ln_factorial(n) + n as f64 * ln_mu).collect();
    Ok(MomentSet::new(lambda, rho, lns, Provenance::ExponentialReference, None))
}

/// Shape statistics from the first four raw moments.
///
/// Uses scaled variables rₙ = E[Bⁿ]/E[B]ⁿ formed by log-space subtraction,
/// so the central-moment sums see only O(n!) magnitudes:
/// μ₂/μ² = r₂-1, μ₃/μ³ = r₃-3r₂+2, μ₄/μ⁴ = r₄-4r₃+6r₂-3.
///
/// Errors when moments up to order 4 are unavailable or flagged divergent;
/// use [`shape_stats_truncated`] to accept effective moments computed under
/// a truncation horizon.
pub fn shape_stats(moments: &MomentSet) -> Result<ShapeStats> {
    if let Some(k) = moments.divergent_from {
        if k <= 4 {
            return Err(Error::DivergentMoments { from: k });
        }
    }
    shape_stats_truncated(moments)
}

/// Shape statistics that accept truncation-dependent effective moments.
pub fn shape_stats_truncated(moments: &MomentSet) -> Result<ShapeStats> {
    if moments.n_max() < 4 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: moments.n_max() as f64,
            constraint: "shape statistics need moments up to order 4",
        });
    }
    let ln1 = moments.ln_moment(1);
    if !ln1.is_finite() {
        return Err(Error::Degenerate {
            what: "mean busy period is zero or non-finite".into(),
        });
    }
    let r2 = (moments.ln_moment(2) - 2.0 * ln1).exp();
    let r3 = (moments.ln_moment(3) - 3.0 * ln1).exp();
    let r4 = (moments.ln_moment(4) - 4.0 * ln1).exp();
    let m2 = r2 - 1.0;
    let m3 = r3 - 3.0 * r2 + 2.0;
    let m4 = r4 - 4.0 * r3 + 6.0 * r2 - 3.0;
    if m2 <= 16.0 * f64::EPSILON * r2 {
        return Err(Error::Degenerate {
            what: format!("scaled second central moment {m2} vanishes within rounding"),
        });
    }
    Ok(ShapeStats {
        delta1: m2.sqrt(),
        delta2: m3 * m3 / (m2 * m2 * m2),
        delta3: m4 / (m2 * m2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ServiceDistribution;

    const LN10: f64 = std::f64::consts::LN_10;

    fn rel_ln(ln_value: f64, expected: f64) -> f64 {
        ((ln_value - expected.ln()).exp() - 1.0).abs()
    }

    #[test]
    fn g1_closed_form_matches_reference_rows() {
        // rho = 0.5, n = 2 and rho = 1, n = 3 reference values
        let m = closed_moments_g1(1.0, 0.5, 4).unwrap();
        assert!(rel_ln(m.ln_moment(2), 2.1391211) < 1e-7);
        let m = closed_moments_g1(1.0, 1.0, 4).unwrap();
        assert!(rel_ln(m.ln_moment(3), 76.178885) < 1e-7);
    }

    #[test]
    fn g1_mean_is_universal() {
        for &(lambda, rho) in &[(1.0, 0.5), (2.0, 3.0), (0.25, 10.0)] {
            let m = closed_moments_g1(lambda, rho, 1).unwrap();
            let expect = rho.exp_m1() / lambda;
            assert!(rel_ln(m.ln_moment(1), expect) < 1e-12);
        }
    }

    #[test]
    fn g1_survives_extreme_rho() {
        let m = closed_moments_g1(1.0, 100.0, 8).unwrap();
        let l10 = m.ln_moment(8) / LN10;
        assert!((l10 - 352.041106).abs() < 1e-4);
        let sci = m.sci(8);
        assert_eq!(sci.exp10, 352);
        // far beyond f64 but still rendered
        assert!(m.moment(8).is_infinite());
        let m = closed_moments_g1(1.0, 2000.0, 8).unwrap();
        assert!(m.ln_moment(8).is_finite());
    }

    #[test]
    fn beta_closed_form_reduces_to_g1_at_zero() {
        let g1 = closed_moments_g1(1.0, 1.0, 6).unwrap();
        let beta = closed_moments_beta(1.0, 1.0, 0.0, 6).unwrap();
        for n in 1..=6 {
            assert!((g1.ln_moment(n) - beta.ln_moment(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_upper_endpoint_is_pure_exponential() {
        let rho: f64 = 1.5;
        let upper = 1.0 / rho.exp_m1();
        let m = closed_moments_beta(1.0, rho, upper, 5).unwrap();
        let mu = rho.exp_m1();
        for n in 1..=5 {
            let expect = ln_factorial(n) + n as f64 * mu.ln();
            assert!((m.ln_moment(n) - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_mean_independent_of_beta() {
        for &beta in &[-0.5, 0.0, 0.3] {
            let m = closed_moments_beta(1.0, 1.0, beta, 1).unwrap();
            assert!(rel_ln(m.ln_moment(1), 1.0f64.exp_m1()) < 1e-12);
        }
    }

    #[test]
    fn beta_degenerate_flagged_not_error() {
        let m = closed_moments_beta(1.0, 1.0, -1.0, 3).unwrap();
        assert_eq!(m.ln_moment(1), f64::NEG_INFINITY);
        assert!(shape_stats_truncated(&m).is_err());
    }

    #[test]
    fn deterministic_derivatives_first_values() {
        let c = c_derivatives_deterministic(1.0, 0.5, 3).unwrap();
        let e = (-0.5f64).exp();
        assert!((c.d[0] - (1.0 - e)).abs() < 1e-15);
        // D1 = (1-e^-.5) - .5 e^-.5 = 0.0902040104...
        assert!((c.d[1] - 0.09020401043104986).abs() < 1e-15);
    }

    #[test]
    fn deterministic_moments_match_reference() {
        // rho = 0.5: E[B^2] = 0.49039984; rho = 1: E[B^4] = 48.000932
        let c = c_derivatives_deterministic(1.0, 0.5, 4).unwrap();
        let m = moments_recurrence(&c, 1.0, 0.5, 4).unwrap();
        assert!(rel_ln(m.ln_moment(2), 0.49039984) < 1e-7);
        let c = c_derivatives_deterministic(1.0, 1.0, 4).unwrap();
        let m = moments_recurrence(&c, 1.0, 1.0, 4).unwrap();
        assert!(rel_ln(m.ln_moment(4), 48.000932) < 1e-7);
    }

    #[test]
    fn quadrature_matches_analytic_deterministic() {
        // the analytic recurrence is the oracle for the quadrature path
        for &rho in &[0.5, 2.0, 8.0, 20.0] {
            let cfg = QueueConfig::new(
                1.0,
                ServiceDistribution::deterministic(rho).unwrap(),
            )
            .unwrap();
            let qd = c_derivatives_quadrature(&cfg, 8, &QuadratureSettings::default()).unwrap();
            let an = c_derivatives_deterministic(1.0, rho, 8).unwrap();
            for n in 0..8 {
                let rel = (qd.d[n] - an.d[n]).abs() / an.d[n].max(1e-300);
                assert!(rel < 1e-9, "rho={rho} n={n}: {} vs {}", qd.d[n], an.d[n]);
            }
        }
    }

    #[test]
    fn quadrature_d0_is_one_minus_exp_neg_rho() {
        for service in crate::distributions::test_catalog() {
            let cfg = QueueConfig::new(1.0, service).unwrap();
            let rho = cfg.rho();
            let settings = QuadratureSettings {
                tail_policy: TailPolicy::TruncateAndWarn,
                ..QuadratureSettings::default()
            };
            let qd = c_derivatives_quadrature(&cfg, 1, &settings).unwrap();
            let expect = -(-rho).exp_m1();
            assert!(
                (qd.d[0] - expect).abs() / expect < 1e-9,
                "{:?}: D0 = {} expected {}",
                cfg.service,
                qd.d[0],
                expect
            );
        }
    }

    #[test]
    fn mm_moment_reference_value() {
        // M|M|inf, lambda = 1, rho = 1: E[B^2] = 7.1649255 (printed digits)
        let cfg = QueueConfig::new(1.0, ServiceDistribution::exponential(1.0).unwrap()).unwrap();
        let qd = c_derivatives_quadrature(&cfg, 2, &QuadratureSettings::default()).unwrap();
        let m = moments_recurrence(&qd, 1.0, 1.0, 2).unwrap();
        assert!(rel_ln(m.ln_moment(2), 7.164858939971) < 1e-9);
        assert!(rel_ln(m.ln_moment(2), 7.1649255) < 2e-5);
    }

    #[test]
    fn pareto_divergence_flags() {
        let cfg = QueueConfig::new(
            1.0,
            ServiceDistribution::pareto_fixed_shape(2.0 / 3.0).unwrap(),
        )
        .unwrap();
        // strict policy names the offending moment order (D_2 feeds E[B^3])
        let err = c_derivatives_quadrature(&cfg, 4, &QuadratureSettings::default());
        match err {
            Err(Error::DivergentIntegral { moment_order, .. }) => {
                assert_eq!(moment_order, Some(3));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        // truncating policy flags D_2 and propagates to moments from order 3
        let settings = QuadratureSettings {
            tail_policy: TailPolicy::TruncateAndWarn,
            ..QuadratureSettings::default()
        };
        let qd = c_derivatives_quadrature(&cfg, 4, &settings).unwrap();
        assert_eq!(qd.divergent_from, Some(2));
        let m = moments_recurrence(&qd, 1.0, 1.0, 4).unwrap();
        assert_eq!(m.divergent_from, Some(3));
        assert!(m.is_divergent(3) && m.is_divergent(4) && !m.is_divergent(2));
        assert!(matches!(shape_stats(&m), Err(Error::DivergentMoments { from: 3 })));
        assert!(shape_stats_truncated(&m).is_ok());

        // infinite-variance fixed-scale member: E[B^2] already divergent
        let cfg = QueueConfig::new(
            1.0,
            ServiceDistribution::pareto_fixed_scale(5.0 / 3.0).unwrap(),
        )
        .unwrap();
        let qd = c_derivatives_quadrature(&cfg, 2, &settings).unwrap();
        assert_eq!(qd.divergent_from, Some(1));
        let m = moments_recurrence(&qd, 1.0, cfg.rho(), 2).unwrap();
        assert_eq!(m.divergent_from, Some(2));
    }

    #[test]
    fn recurrence_first_moment_is_mean_law() {
        let c = c_derivatives_deterministic(2.0, 1.5, 1).unwrap();
        let m = moments_recurrence(&c, 2.0, 3.0, 1).unwrap();
        assert!(rel_ln(m.ln_moment(1), 3.0f64.exp_m1() / 2.0) < 1e-12);
    }

    #[test]
    fn exponential_reference_values() {
        let m = exponential_reference_moments(0.5f64.exp_m1(), 2).unwrap();
        assert!(rel_ln(m.ln_moment(2), 0.84167857) < 1e-7);
        let m = exponential_reference_for(1.0, 1.0, 8).unwrap();
        assert!(rel_ln(m.ln_moment(8), 3063907.9) < 1e-7);
        let m = exponential_reference_moments(1.0, 1).unwrap();
        assert!(rel_ln(m.ln_moment(1), 1.0) < 1e-14);
    }

    #[test]
    fn shape_of_exponential_is_1_4_9() {
        for &mu in &[0.3, 1.0, 22026.4] {
            let m = exponential_reference_moments(mu, 4).unwrap();
            let s = shape_stats(&m).unwrap();
            assert!((s.delta1 - 1.0).abs() < 1e-9);
            assert!((s.delta2 - 4.0).abs() < 1e-8);
            assert!((s.delta3 - 9.0).abs() < 1e-8);
        }
    }

    #[test]
    fn shape_reference_rows() {
        // M|G1|inf rho = 0.5 row
        let m = closed_moments_g1(1.0, 0.5, 4).unwrap();
        let s = shape_stats(&m).unwrap();
        assert!((s.delta1 - 2.0206405).abs() < 1e-6);
        assert!((s.delta2 - 9.5577742).abs() < 1e-5);
        assert!((s.delta3 - 15.983720).abs() < 1e-4);
        // M|D|inf rho = 1 row
        let c = c_derivatives_deterministic(1.0, 1.0, 4).unwrap();
        let m = moments_recurrence(&c, 1.0, 1.0, 4).unwrap();
        let s = shape_stats(&m).unwrap();
        assert!((s.delta1 - 0.56798436).abs() < 1e-7);
        assert!((s.delta2 - 4.5899937).abs() < 1e-6);
        assert!((s.delta3 - 9.6137084).abs() < 1e-6);
    }

    #[test]
    fn shape_requires_four_moments() {
        let m = closed_moments_g1(1.0, 1.0, 3).unwrap();
        assert!(shape_stats(&m).is_err());
    }

    #[test]
    fn recurrence_matches_literal_alternating_form() {
        // the all-positive log-space recurrence must agree with the literal
        // alternating-sign form (plain f64) on small instances
        let cases: Vec<CDerivatives> = vec![
            c_derivatives_deterministic(1.0, 0.5, 6).unwrap(),
            c_derivatives_deterministic(0.7, 1.3, 6).unwrap(),
            {
                let cfg = QueueConfig::new(
                    1.0,
                    ServiceDistribution::exponential(0.8).unwrap(),
                )
                .unwrap();
                c_derivatives_quadrature(&cfg, 6, &QuadratureSettings::default()).unwrap()
            },
        ];
        let lams = [1.0, 0.7, 1.0];
        let rhos = [0.5, 0.91, 0.8];
        for (i, c) in cases.iter().enumerate() {
            let (lambda, rho) = (lams[i], rhos[i]);
            let m = moments_recurrence(c, lambda, rho, 6).unwrap();
            // literal form: E[B^n] = (-1)^{n+1} { (e^rho/lam) n C^{(n-1)}(0)
            //   - e^rho sum_p (-1)^{n-p} C(n,p) E[B^{n-p}] C^{(p)}(0) }
            // with C^{(p)}(0) = (-1)^p D_p
            let cder: Vec<f64> = c
                .d
                .iter()
                .enumerate()
                .map(|(p, &dp)| if p % 2 == 0 { dp } else { -dp })
                .collect();
            let erho = rho.exp();
            let mut lit = vec![0.0f64; 7];
            for n in 1..=6 {
                let mut s = (erho / lambda) * n as f64 * cder[n - 1];
                for p in 1..n {
                    let binom = ((ln_binomial(n, p)).exp()).round();
                    let sign = if (n - p) % 2 == 0 { 1.0 } else { -1.0 };
                    s -= erho * sign * binom * lit[n - p] * cder[p];
                }
                let lead = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
                lit[n] = lead * s;
            }
            for n in 1..=6 {
                let rel = ((m.ln_moment(n) - lit[n].ln()).exp() - 1.0).abs();
                assert!(rel < 1e-12, "case {i} n={n}: log-space vs literal rel {rel}");
            }
        }
    }
}
