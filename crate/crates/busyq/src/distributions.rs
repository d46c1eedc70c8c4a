//! Service-time distributions and queue configuration.
//!
//! Every family exposes the CDF G(t), the mean α, the support bound, the
//! integrated tail ∫₀ᵗ [1-G(v)] dv (the exponent kernel of the busy-period
//! transform) and its residual ∫ₜ^∞ [1-G(v)] dv = α - integrated_tail(t),
//! each in closed form. All objects are immutable after construction and
//! safe to share across threads.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Asymptotic behavior of the survival function 1-G(t), used to pick
/// truncation strategies for semi-infinite integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvivalTail {
    /// 1-G(t) = 0 for t >= bound.
    CompactSupport { bound: f64 },
    /// 1-G(t) ~ C e^{-rate t}.
    Exponential { rate: f64 },
    /// 1-G(t) ~ C t^{-exponent}.
    Power { exponent: f64 },
}

/// A service-time law from the catalog.
///
/// `BetaFamily` is parameterized by (λ, ρ, β) rather than by its mean: the
/// CDF formula contains ρ itself, and α = ρ/λ follows. Its probability mass
/// at t = 0 is stored explicitly so that quadrature and simulation can treat
/// the atom exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ServiceDistribution {
    /// Unit step at `alpha`: every service takes exactly `alpha`.
    Deterministic { alpha: f64 },
    /// G(t) = 1 - e^{-t/alpha}.
    Exponential { alpha: f64 },
    /// G(t) = t^c on [0,1); mean c/(c+1).
    Power { c: f64 },
    /// 1-G(t) = (k/t)^3 for t >= k; mean 3k/2.
    ParetoFixedShape { k: f64 },
    /// 1-G(t) = (0.4/t)^theta for t >= 0.4, theta > 1; mean 0.4 theta/(theta-1).
    ParetoFixedScale { theta: f64 },
    /// The constant-β service family whose busy period is a mixture of an
    /// atom at the origin and an exponential law. β = 0 gives the G₁ family
    /// with G(0) = e^{-ρ}.
    BetaFamily { lambda: f64, rho: f64, beta: f64 },
    /// Piecewise-linear CDF through user-supplied (t, G) points.
    Tabulated(TabulatedCdf),
}

/// Grid-specified CDF with linear interpolation; integrated tail by
/// trapezoid. The grid must start at t = 0 and end with G = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCdf {
    ts: Vec<f64>,
    gs: Vec<f64>,
    /// trapezoid partial integrals of 1-G up to each grid point
    tail_integral: Vec<f64>,
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            constraint: "must be a positive finite real",
        });
    }
    Ok(())
}

impl ServiceDistribution {
    pub fn deterministic(alpha: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        Ok(ServiceDistribution::Deterministic { alpha })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        Ok(ServiceDistribution::Exponential { alpha })
    }

    pub fn power(c: f64) -> Result<Self> {
        require_positive("c", c)?;
        Ok(ServiceDistribution::Power { c })
    }

    pub fn pareto_fixed_shape(k: f64) -> Result<Self> {
        require_positive("k", k)?;
        Ok(ServiceDistribution::ParetoFixedShape { k })
    }

    pub fn pareto_fixed_scale(theta: f64) -> Result<Self> {
        if !(theta > 1.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                constraint: "must exceed 1 (theta <= 1 has infinite mean)",
            });
        }
        Ok(ServiceDistribution::ParetoFixedScale { theta })
    }

    /// Constant-β family. Admissible band: -λ <= β <= λ/(e^ρ - 1); both
    /// endpoints are accepted and produce the stated degenerate limits.
    pub fn beta_family(lambda: f64, rho: f64, beta: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_positive("rho", rho)?;
        let upper = lambda / rho.exp_m1();
        if !(beta >= -lambda && beta <= upper) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                constraint: "must lie in [-lambda, lambda/(e^rho - 1)]",
            });
        }
        Ok(ServiceDistribution::BetaFamily { lambda, rho, beta })
    }

    /// Build from (t, G) pairs. Requires t ascending from 0, G nondecreasing
    /// within [0,1], and G = 1 at the last point.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        TabulatedCdf::new(points).map(ServiceDistribution::Tabulated)
    }

    /// Mean service time α. Zero only for the degenerate β = -λ member.
    pub fn mean(&self) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { alpha } => alpha,
            ServiceDistribution::Exponential { alpha } => alpha,
            ServiceDistribution::Power { c } => c / (c + 1.0),
            ServiceDistribution::ParetoFixedShape { k } => 1.5 * k,
            ServiceDistribution::ParetoFixedScale { theta } => 0.4 * theta / (theta - 1.0),
            ServiceDistribution::BetaFamily { lambda, rho, beta } => {
                if beta == -lambda {
                    0.0
                } else {
                    rho / lambda
                }
            }
            ServiceDistribution::Tabulated(ref tab) => *tab.tail_integral.last().unwrap(),
        }
    }

    /// Upper end of the support; +inf for unbounded families.
    pub fn support_upper(&self) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { alpha } => alpha,
            ServiceDistribution::Exponential { .. } => f64::INFINITY,
            ServiceDistribution::Power { .. } => 1.0,
            ServiceDistribution::ParetoFixedShape { .. } => f64::INFINITY,
            ServiceDistribution::ParetoFixedScale { .. } => f64::INFINITY,
            ServiceDistribution::BetaFamily { lambda, beta, .. } => {
                if beta == -lambda {
                    // G == 1 everywhere: all mass at the origin
                    f64::MIN_POSITIVE
                } else {
                    f64::INFINITY
                }
            }
            ServiceDistribution::Tabulated(ref tab) => *tab.ts.last().unwrap(),
        }
    }

    /// Probability mass at t = 0 (nonzero only for the β family and for
    /// tabulated CDFs with G(0) > 0).
    pub fn atom_at_zero(&self) -> f64 {
        match *self {
            ServiceDistribution::BetaFamily { lambda, rho, beta } => {
                let q = -(-rho).exp_m1();
                (1.0 - q * (lambda + beta) / lambda).max(0.0)
            }
            ServiceDistribution::Tabulated(ref tab) => tab.gs[0],
            _ => 0.0,
        }
    }

    /// G(t); right-continuous, G(0) equals the atom at zero.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        require_time(t)?;
        Ok(1.0 - self.survival_unchecked(t))
    }

    /// 1 - G(t).
    pub fn survival(&self, t: f64) -> Result<f64> {
        require_time(t)?;
        Ok(self.survival_unchecked(t))
    }

    pub(crate) fn survival_unchecked(&self, t: f64) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { alpha } => {
                if t < alpha {
                    1.0
                } else {
                    0.0
                }
            }
            ServiceDistribution::Exponential { alpha } => (-t / alpha).exp(),
            ServiceDistribution::Power { c } => {
                if t < 1.0 {
                    // log-space power for small bases
                    1.0 - pow_pos(t, c)
                } else {
                    0.0
                }
            }
            ServiceDistribution::ParetoFixedShape { k } => {
                if t < k {
                    1.0
                } else {
                    pow_pos(k / t, 3.0)
                }
            }
            ServiceDistribution::ParetoFixedScale { theta } => {
                if t < 0.4 {
                    1.0
                } else {
                    pow_pos(0.4 / t, theta)
                }
            }
            ServiceDistribution::BetaFamily { lambda, rho, beta } => {
                if beta == -lambda {
                    return 0.0;
                }
                let b = lambda + beta;
                let q = -(-rho).exp_m1();
                // q b e^{-bt} / (λ [e^{-ρ}(1 - e^{-bt}) + e^{-bt}]), stable for large bt
                let ebt = (-b * t).exp();
                q * b * ebt / (lambda * ((-rho).exp() * (1.0 - ebt) + ebt))
            }
            ServiceDistribution::Tabulated(ref tab) => 1.0 - tab.cdf(t),
        }
    }

    /// Integrated tail ∫₀ᵗ [1-G(v)] dv; nondecreasing, concave, -> mean.
    pub fn integrated_tail(&self, t: f64) -> Result<f64> {
        require_time(t)?;
        Ok(self.integrated_tail_unchecked(t))
    }

    pub(crate) fn integrated_tail_unchecked(&self, t: f64) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { alpha } => t.min(alpha),
            ServiceDistribution::Exponential { alpha } => -alpha * (-t / alpha).exp_m1(),
            ServiceDistribution::Power { c } => {
                if t < 1.0 {
                    t - pow_pos(t, c + 1.0) / (c + 1.0)
                } else {
                    c / (c + 1.0)
                }
            }
            ServiceDistribution::ParetoFixedShape { k } => {
                if t < k {
                    t
                } else {
                    1.5 * k - k * pow_pos(k / t, 2.0) / 2.0
                }
            }
            ServiceDistribution::ParetoFixedScale { theta } => {
                if t < 0.4 {
                    t
                } else {
                    let alpha = 0.4 * theta / (theta - 1.0);
                    alpha - (alpha - 0.4) * pow_pos(t / 0.4, 1.0 - theta)
                }
            }
            ServiceDistribution::BetaFamily { lambda, rho, beta } => {
                if beta == -lambda {
                    return 0.0;
                }
                // α - ln(1 + q e^{ρ - bt})/λ with q = 1 - e^{-ρ}; the residual
                // form is exact for large t, clamp shields rounding at t = 0
                (rho / lambda - self.tail_residual_unchecked(t)).max(0.0)
            }
            ServiceDistribution::Tabulated(ref tab) => tab.integrated_tail(t),
        }
    }

    /// Residual tail integral ∫ₜ^∞ [1-G(v)] dv = mean - integrated_tail(t),
    /// in closed form (no cancellation for large t).
    pub fn tail_residual(&self, t: f64) -> Result<f64> {
        require_time(t)?;
        Ok(self.tail_residual_unchecked(t))
    }

    pub(crate) fn tail_residual_unchecked(&self, t: f64) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { alpha } => (alpha - t).max(0.0),
            ServiceDistribution::Exponential { alpha } => alpha * (-t / alpha).exp(),
            ServiceDistribution::Power { c } => {
                if t < 1.0 {
                    let alpha = c / (c + 1.0);
                    alpha - t + pow_pos(t, c + 1.0) / (c + 1.0)
                } else {
                    0.0
                }
            }
            ServiceDistribution::ParetoFixedShape { k } => {
                if t < k {
                    1.5 * k - t
                } else {
                    k * pow_pos(k / t, 2.0) / 2.0
                }
            }
            ServiceDistribution::ParetoFixedScale { theta } => {
                if t < 0.4 {
                    0.4 * theta / (theta - 1.0) - t
                } else {
                    (0.4 / (theta - 1.0)) * pow_pos(t / 0.4, 1.0 - theta)
                }
            }
            ServiceDistribution::BetaFamily { lambda, rho, beta } => {
                if beta == -lambda {
                    return 0.0;
                }
                let b = lambda + beta;
                let q = -(-rho).exp_m1();
                (q * (rho - b * t).exp()).ln_1p() / lambda
            }
            ServiceDistribution::Tabulated(ref tab) => {
                (self.mean() - tab.integrated_tail(t)).max(0.0)
            }
        }
    }

    /// Tail class of 1-G, for semi-infinite quadrature planning.
    pub fn survival_tail(&self) -> SurvivalTail {
        match *self {
            ServiceDistribution::Deterministic { alpha } => {
                SurvivalTail::CompactSupport { bound: alpha }
            }
            ServiceDistribution::Exponential { alpha } => {
                SurvivalTail::Exponential { rate: 1.0 / alpha }
            }
            ServiceDistribution::Power { .. } => SurvivalTail::CompactSupport { bound: 1.0 },
            ServiceDistribution::ParetoFixedShape { .. } => SurvivalTail::Power { exponent: 3.0 },
            ServiceDistribution::ParetoFixedScale { theta } => {
                SurvivalTail::Power { exponent: theta }
            }
            ServiceDistribution::BetaFamily { lambda, beta, .. } => SurvivalTail::Exponential {
                rate: (lambda + beta).max(f64::MIN_POSITIVE),
            },
            ServiceDistribution::Tabulated(ref tab) => SurvivalTail::CompactSupport {
                bound: *tab.ts.last().unwrap(),
            },
        }
    }

    /// Interior points where G or its derivative jumps; quadrature callers
    /// supply these as panel boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ServiceDistribution::Deterministic { alpha } => vec![alpha],
            ServiceDistribution::ParetoFixedShape { k } => vec![k],
            ServiceDistribution::ParetoFixedScale { .. } => vec![0.4],
            ServiceDistribution::Power { .. } => vec![1.0],
            ServiceDistribution::Tabulated(ref tab) => tab.ts.clone(),
            _ => Vec::new(),
        }
    }

    /// Quantile G⁻¹(u) for u in [0, 1); used by the simulator. Families with
    /// an atom at zero return 0 for u below the atom; the β family inverts
    /// its continuous part by bisection.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain {
                what: format!("quantile argument {u} outside [0, 1)"),
            });
        }
        Ok(match *self {
            ServiceDistribution::Deterministic { alpha } => alpha,
            ServiceDistribution::Exponential { alpha } => -alpha * (-u).ln_1p(),
            ServiceDistribution::Power { c } => pow_pos(u, 1.0 / c),
            ServiceDistribution::ParetoFixedShape { k } => k * pow_pos(1.0 - u, -1.0 / 3.0),
            ServiceDistribution::ParetoFixedScale { theta } => {
                0.4 * pow_pos(1.0 - u, -1.0 / theta)
            }
            ServiceDistribution::BetaFamily { lambda, beta, .. } => {
                if beta == -lambda {
                    return Ok(0.0);
                }
                let atom = self.atom_at_zero();
                if u <= atom {
                    0.0
                } else {
                    self.bisect_quantile(u)
                }
            }
            ServiceDistribution::Tabulated(ref tab) => tab.quantile(u),
        })
    }

    fn bisect_quantile(&self, u: f64) -> f64 {
        let mut hi = 1.0;
        while 1.0 - self.survival_unchecked(hi) < u {
            hi *= 2.0;
            if hi > 1e300 {
                return hi;
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 * (1.0 + lo) {
            let mid = 0.5 * (lo + hi);
            if 1.0 - self.survival_unchecked(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// (base)^p through exp/ln for positive base; avoids under/overflow surprises
/// of powf on extreme arguments and keeps Pareto tails accurate in log space.
fn pow_pos(base: f64, p: f64) -> f64 {
    if base == 0.0 {
        return if p > 0.0 { 0.0 } else { f64::INFINITY };
    }
    (p * base.ln()).exp()
}

fn require_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain {
            what: format!("time argument {t} must be nonnegative"),
        });
    }
    Ok(())
}

impl TabulatedCdf {
    fn new(points: &[(f64, f64)]) -> Result<TabulatedCdf> {
        if points.len() < 2 {
            return Err(Error::Tabulated {
                what: "need at least two (t, G) points".into(),
            });
        }
        if points[0].0 != 0.0 {
            return Err(Error::Tabulated {
                what: format!("grid must start at t = 0, got {}", points[0].0),
            });
        }
        let last_g = points.last().unwrap().1;
        if (last_g - 1.0).abs() > 1e-9 {
            return Err(Error::Tabulated {
                what: format!("grid must end with G = 1, got {last_g}"),
            });
        }
        let mut ts = Vec::with_capacity(points.len());
        let mut gs = Vec::with_capacity(points.len());
        for &(t, g) in points {
            if let Some(&prev) = ts.last() {
                if t <= prev {
                    return Err(Error::Tabulated {
                        what: format!("t values must be strictly increasing at t = {t}"),
                    });
                }
            }
            if !(0.0..=1.0 + 1e-12).contains(&g) || (gs.last().map_or(false, |&p: &f64| g < p)) {
                return Err(Error::Tabulated {
                    what: format!("G values must be nondecreasing within [0, 1], got {g}"),
                });
            }
            ts.push(t);
            gs.push(g.min(1.0));
        }
        let mut tail_integral = vec![0.0];
        for i in 1..ts.len() {
            let seg = 0.5 * ((1.0 - gs[i - 1]) + (1.0 - gs[i])) * (ts[i] - ts[i - 1]);
            tail_integral.push(tail_integral[i - 1] + seg);
        }
        Ok(TabulatedCdf { ts, gs, tail_integral })
    }

    fn cdf(&self, t: f64) -> f64 {
        if t >= *self.ts.last().unwrap() {
            return 1.0;
        }
        let i = self.ts.partition_point(|&x| x <= t);
        // i >= 1 since ts[0] = 0 <= t
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let (g0, g1) = (self.gs[i - 1], self.gs[i]);
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }

    fn integrated_tail(&self, t: f64) -> f64 {
        let t_end = *self.ts.last().unwrap();
        if t >= t_end {
            return *self.tail_integral.last().unwrap();
        }
        let i = self.ts.partition_point(|&x| x <= t);
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let (s0, s1) = (1.0 - self.gs[i - 1], 1.0 - self.gs[i]);
        let frac = (t - t0) / (t1 - t0);
        let s_t = s0 + (s1 - s0) * frac;
        self.tail_integral[i - 1] + 0.5 * (s0 + s_t) * (t - t0)
    }

    fn quantile(&self, u: f64) -> f64 {
        if u <= self.gs[0] {
            return 0.0;
        }
        let i = self.gs.partition_point(|&g| g < u);
        let (g0, g1) = (self.gs[i - 1], self.gs[i]);
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        if g1 == g0 {
            return t1;
        }
        t0 + (t1 - t0) * (u - g0) / (g1 - g0)
    }
}

/// Arrival rate λ paired with a service distribution; ρ = λα is always
/// derived, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueConfig {
    pub lambda: f64,
    pub service: ServiceDistribution,
}

impl QueueConfig {
    pub fn new(lambda: f64, service: ServiceDistribution) -> Result<QueueConfig> {
        require_positive("lambda", lambda)?;
        if !(service.mean() > 0.0) {
            return Err(Error::Degenerate {
                what: "service mean is zero; traffic intensity would vanish".into(),
            });
        }
        Ok(QueueConfig { lambda, service })
    }

    /// Traffic intensity ρ = λ α.
    pub fn rho(&self) -> f64 {
        self.lambda * self.service.mean()
    }
}

/// Parse a CLI distribution specification such as `det:alpha=1`,
/// `exp:alpha=2`, `pow:c=4`, `pareto3:k=0.667`, `paretok:theta=1.667`,
/// `beta:lambda=1,rho=1,beta=0` or `table:path=FILE.csv`.
pub fn parse_spec(spec: &str) -> Result<ServiceDistribution> {
    let err = |what: &str| Error::Spec {
        spec: spec.to_string(),
        what: what.to_string(),
    };
    let (kind, rest) = spec.split_once(':').ok_or_else(|| err("expected `kind:key=value,...`"))?;
    let mut kv = std::collections::BTreeMap::new();
    for piece in rest.split(',') {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| err("expected `key=value` pairs"))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| err(&format!("missing field `{key}`")))?
            .parse::<f64>()
            .map_err(|_| err(&format!("field `{key}` is not a number")))
    };
    match kind {
        "det" => ServiceDistribution::deterministic(get("alpha")?),
        "exp" => ServiceDistribution::exponential(get("alpha")?),
        "pow" => ServiceDistribution::power(get("c")?),
        "pareto3" => ServiceDistribution::pareto_fixed_shape(get("k")?),
        "paretok" => ServiceDistribution::pareto_fixed_scale(get("theta")?),
        "beta" => ServiceDistribution::beta_family(get("lambda")?, get("rho")?, get("beta")?),
        "table" => {
            let path = kv.get("path").ok_or_else(|| err("missing field `path`"))?;
            tabulated_from_csv(path)
        }
        other => Err(err(&format!("unknown distribution kind `{other}`"))),
    }
}

/// Load a tabulated CDF from a CSV file with columns `t,G` (header optional).
pub fn tabulated_from_csv(path: &str) -> Result<ServiceDistribution> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Tabulated { what: format!("{path}: {e}") })?;
    let mut points = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Tabulated { what: format!("{path}: {e}") })?;
        if record.len() < 2 {
            return Err(Error::Tabulated {
                what: format!("{path}: row {} has fewer than 2 columns", idx + 1),
            });
        }
        let t = record[0].trim().parse::<f64>();
        let g = record[1].trim().parse::<f64>();
        match (t, g) {
            (Ok(t), Ok(g)) => points.push((t, g)),
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(Error::Tabulated {
                    what: format!("{path}: row {} is not numeric", idx + 1),
                })
            }
        }
    }
    ServiceDistribution::tabulated(&points)
}

/// Catalog instances exercised across the crate's unit tests.
#[cfg(test)]
pub(crate) fn test_catalog() -> Vec<ServiceDistribution> {
    vec![
        ServiceDistribution::deterministic(1.0).unwrap(),
        ServiceDistribution::exponential(1.0).unwrap(),
        ServiceDistribution::power(4.0).unwrap(),
        ServiceDistribution::power(1.0 / 3.0).unwrap(),
        ServiceDistribution::pareto_fixed_shape(2.0 / 3.0).unwrap(),
        ServiceDistribution::pareto_fixed_scale(3.0).unwrap(),
        ServiceDistribution::beta_family(1.0, 1.0, 0.0).unwrap(),
        ServiceDistribution::beta_family(1.0, 0.5, 0.3).unwrap(),
        ServiceDistribution::tabulated(&[(0.0, 0.0), (0.5, 0.25), (1.5, 0.9), (3.0, 1.0)]).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_step() {
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        assert_eq!(d.cdf(0.5).unwrap(), 0.0);
        assert_eq!(d.cdf(1.0).unwrap(), 1.0);
        let d = ServiceDistribution::deterministic(0.5).unwrap();
        assert_eq!(d.integrated_tail(2.0).unwrap(), 0.5);
        assert!(ServiceDistribution::deterministic(0.0).is_err());
        assert!(ServiceDistribution::deterministic(-1.0).is_err());
    }

    #[test]
    fn deterministic_rho_with_unit_lambda() {
        let cfg = QueueConfig::new(1.0, ServiceDistribution::deterministic(1.0).unwrap()).unwrap();
        assert_eq!(cfg.rho(), 1.0);
    }

    #[test]
    fn exponential_basics() {
        let d = ServiceDistribution::exponential(1.0).unwrap();
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
        assert!((d.integrated_tail(80.0).unwrap() - 1.0).abs() < 1e-12);
        let d2 = ServiceDistribution::exponential(2.0).unwrap();
        let expect = 2.0 * (1.0 - (-1.0f64).exp());
        assert!((d2.integrated_tail(2.0).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 1.2642411).abs() < 1e-7);
    }

    #[test]
    fn power_family() {
        let d = ServiceDistribution::power(1.0 / 3.0).unwrap();
        assert!((d.mean() - 0.25).abs() < 1e-15);
        let u = ServiceDistribution::power(1.0).unwrap();
        assert!((u.cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(u.cdf(2.0).unwrap(), 1.0);
    }

    #[test]
    fn pareto_fixed_shape_mean_and_tail() {
        let d = ServiceDistribution::pareto_fixed_shape(2.0 / 3.0).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-15);
        assert!((d.integrated_tail(1e9).unwrap() - d.mean()).abs() < 1e-12);
        // log-space tail evaluation stays finite and accurate far out
        let s = d.survival(1e100).unwrap();
        assert!(s > 0.0 && s < 1e-290);
    }

    #[test]
    fn pareto_fixed_scale_mean() {
        // theta solving 0.4 theta/(theta-1) = 1 is 5/3
        let d = ServiceDistribution::pareto_fixed_scale(5.0 / 3.0).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-12);
        assert!(ServiceDistribution::pareto_fixed_scale(1.0).is_err());
        // mean -> 0.4 as theta -> inf
        let d = ServiceDistribution::pareto_fixed_scale(1e6).unwrap();
        assert!((d.mean() - 0.4).abs() < 1e-5);
    }

    #[test]
    fn beta_family_atom_and_band() {
        let d = ServiceDistribution::beta_family(1.0, 1.0, 0.0).unwrap();
        assert!((d.cdf(0.0).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((d.atom_at_zero() - (-1.0f64).exp()).abs() < 1e-12);
        // outside the band
        assert!(ServiceDistribution::beta_family(1.0, 1.0, -1.5).is_err());
        let upper = 1.0 / 1.0f64.exp_m1();
        assert!(ServiceDistribution::beta_family(1.0, 1.0, upper + 1e-6).is_err());
        // both endpoints accepted
        assert!(ServiceDistribution::beta_family(1.0, 1.0, upper).is_ok());
        let degenerate = ServiceDistribution::beta_family(1.0, 1.0, -1.0).unwrap();
        assert_eq!(degenerate.cdf(0.0).unwrap(), 1.0);
        assert_eq!(degenerate.cdf(5.0).unwrap(), 1.0);
        assert!(QueueConfig::new(1.0, degenerate).is_err());
    }

    #[test]
    fn beta_family_upper_endpoint_has_no_atom() {
        let upper = 1.0 / 1.0f64.exp_m1();
        let d = ServiceDistribution::beta_family(1.0, 1.0, upper).unwrap();
        assert!(d.atom_at_zero().abs() < 1e-12);
    }

    #[test]
    fn integrated_tail_at_zero_and_cap() {
        for d in catalog() {
            assert_eq!(d.integrated_tail(0.0).unwrap(), 0.0);
            let m = d.mean();
            let far = d.integrated_tail(1e7).unwrap();
            assert!(far <= m * (1.0 + 1e-9));
        }
        let det = ServiceDistribution::deterministic(1.0).unwrap();
        assert_eq!(det.integrated_tail(3.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_time_rejected() {
        let d = ServiceDistribution::exponential(1.0).unwrap();
        assert!(d.cdf(-0.1).is_err());
        assert!(d.integrated_tail(-0.1).is_err());
    }

    #[test]
    fn tail_residual_consistent_with_integrated_tail() {
        for d in catalog() {
            for &t in &[0.0, 0.3, 0.9, 2.0, 17.0] {
                let lhs = d.tail_residual(t).unwrap();
                let rhs = d.mean() - d.integrated_tail(t).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-12 * (1.0 + d.mean()),
                    "mismatch for {d:?} at t={t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn quantile_round_trip() {
        for d in catalog() {
            let discrete = matches!(d, ServiceDistribution::Deterministic { .. });
            for &u in &[0.01, 0.3, 0.7, 0.99] {
                let t = d.quantile(u).unwrap();
                let g = d.cdf(t).unwrap();
                // G(q(u)) >= u always; equality wherever G is continuous
                assert!(g + 1e-9 >= u, "{d:?}: G(q({u})) = {g}");
                if !discrete && t > 0.0 {
                    assert!((g - u).abs() < 1e-9, "{d:?}: G(q({u})) = {g}");
                }
            }
            assert!(d.quantile(1.0).is_err());
            assert!(d.quantile(-0.1).is_err());
        }
    }

    #[test]
    fn tabulated_grid() {
        let d = ServiceDistribution::tabulated(&[(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-12);
        assert!((d.cdf(0.5).unwrap() - 0.25).abs() < 1e-12);
        assert!((d.integrated_tail(1.0).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(d.support_upper(), 2.0);
        assert!(ServiceDistribution::tabulated(&[(0.0, 0.0), (1.0, 0.8)]).is_err());
        assert!(ServiceDistribution::tabulated(&[(0.5, 0.0), (1.0, 1.0)]).is_err());
        assert!(ServiceDistribution::tabulated(&[(0.0, 0.5), (1.0, 0.2)]).is_err());
    }

    #[test]
    fn spec_strings_parse() {
        assert!(matches!(
            parse_spec("det:alpha=1").unwrap(),
            ServiceDistribution::Deterministic { alpha } if alpha == 1.0
        ));
        assert!(matches!(
            parse_spec("beta:lambda=1,rho=2,beta=0").unwrap(),
            ServiceDistribution::BetaFamily { rho, .. } if rho == 2.0
        ));
        assert!(parse_spec("nope:x=1").is_err());
        assert!(parse_spec("det:alpha=oops").is_err());
        assert!(parse_spec("det").is_err());
    }

    fn catalog() -> Vec<ServiceDistribution> {
        super::test_catalog()
    }
}
