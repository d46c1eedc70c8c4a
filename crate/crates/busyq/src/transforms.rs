//! Busy-period transform and distribution function.
//!
//! The Laplace–Stieltjes transform is
//! B̄(s) = 1 + λ⁻¹(s - 1/∫₀^∞ e^{-st-λ∫₀ᵗ[1-G]} dt), and inverting B̄(s)/s
//! produces the convolution series
//! B(t) = 1 - λ⁻¹ Σ_{n>=1} (1-e^{-ρ})ⁿ h^{*n}(t), where
//! h(t) = e^{-λ∫₀ᵗ[1-G]} λ(1-G(t))/(1-e^{-ρ}) is a proper density (its
//! antiderivative is -e^{-λ∫(1-G)}). The series is the inversion route; no
//! complex-plane machinery is used.

use crate::distributions::{QueueConfig, SurvivalTail};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSettings, TailClass};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    Density,
    Cdf,
}

/// A function tabulated on a uniform time grid starting at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub kind: GridKind,
}

impl GridFunction {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.values.len().saturating_sub(1))
    }

    /// Linear interpolation; clamps outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().unwrap();
        }
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Largest |self - f| over the grid points.
    pub fn sup_norm_against<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - f(self.t(i))).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |self - other| over this grid (other interpolated).
    pub fn sup_norm_diff(&self, other: &GridFunction) -> f64 {
        self.sup_norm_against(|t| other.value_at(t))
    }
}

/// Number of series terms: automatic (geometric tail bound plus on-grid
/// die-out, capped at 400) or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NTerms {
    Auto,
    Fixed(usize),
}

/// Cap on automatically chosen convolution terms.
pub const N_TERMS_CAP: usize = 400;

/// Grid and truncation controls for the convolution series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSettings {
    /// Grid step; `None` picks min(α, 1/λ)/200.
    pub dt: Option<f64>,
    /// Grid extent.
    pub t_max: f64,
    pub n_terms: NTerms,
}

impl SeriesSettings {
    pub fn new(t_max: f64) -> SeriesSettings {
        SeriesSettings { dt: None, t_max, n_terms: NTerms::Auto }
    }

    pub fn resolve_dt(&self, config: &QueueConfig) -> f64 {
        self.dt.unwrap_or_else(|| {
            let alpha = config.service.mean();
            (alpha.min(1.0 / config.lambda)) / 200.0
        })
    }
}

/// Convolution-series CDF plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCdf {
    pub grid: GridFunction,
    pub terms_used: usize,
    /// Bound on the dropped series tail, uniform over the grid.
    pub series_tail_bound: f64,
    /// Set when e^{-ρ} underflowed and the heavy-traffic form was substituted.
    pub fell_back_to_heavy_traffic: bool,
}

/// Busy-period Laplace–Stieltjes transform B̄(s) for s > 0.
///
/// The inner integral A(s) = ∫₀^∞ e^{-st-λI(t)} dt is evaluated in the
/// tail-residual form A(s) = e^{-ρ}(1/s + ∫₀^∞ e^{-st}(e^{λR(t)} - 1) dt)
/// with R(t) = ∫ₜ^∞[1-G]: the 1/s mass is exact and the remaining integrand
/// decays at the service-tail rate rather than at rate s. This keeps small s
/// (transform behavior near the origin) well-conditioned.
pub fn lst_busy_period(
    config: &QueueConfig,
    s: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            constraint: "transform argument must be positive",
        });
    }
    let lambda = config.lambda;
    let rho = config.rho();
    let service = config.service.clone();
    let integrand = {
        let service = service.clone();
        move |t: f64| (-s * t).exp() * (lambda * service.tail_residual_unchecked(t)).exp_m1()
    };
    let breakpoints = service.breakpoints();
    let r = match service.survival_tail() {
        SurvivalTail::CompactSupport { bound } => quadrature::integrate_finite_with_breakpoints(
            integrand,
            0.0,
            bound,
            &breakpoints,
            settings,
        )?,
        SurvivalTail::Exponential { rate } => quadrature::integrate_semi_infinite(
            integrand,
            0.0,
            TailClass::ExponentialTail { rate: rate + s, poly_degree: 0.0 },
            &breakpoints,
            settings,
        )?,
        SurvivalTail::Power { exponent } => {
            if exponent > 2.0 {
                // e^{λR} - 1 ~ λR ~ C t^{1-exponent}
                quadrature::integrate_semi_infinite(
                    integrand,
                    0.0,
                    TailClass::PowerTail { exponent: 1.0 - exponent },
                    &breakpoints,
                    settings,
                )?
            } else {
                // R decays too slowly to carry the bound alone; lean on e^{-st}
                quadrature::integrate_semi_infinite(
                    integrand,
                    0.0,
                    TailClass::ExponentialTail { rate: s, poly_degree: 0.0 },
                    &breakpoints,
                    settings,
                )?
            }
        }
    };
    // 1/A = e^{ρ} / (1/s + J)
    let a_scaled = 1.0 / s + r.value;
    let inv_a = rho.exp() / a_scaled;
    let value = 1.0 + (s - inv_a) / lambda;
    Ok(value.clamp(0.0, 1.0))
}

/// LST of a tabulated CDF: B̄(s) = 1 - s ∫ e^{-st}(1 - B(t)) dt by trapezoid
/// over the grid. Cross-checks the series against the direct transform.
pub fn lst_of_grid(cdf: &GridFunction, s: f64) -> f64 {
    debug_assert_eq!(cdf.kind, GridKind::Cdf);
    let dt = cdf.dt;
    let mut acc = 0.0;
    for (i, &v) in cdf.values.iter().enumerate() {
        let w = if i == 0 || i + 1 == cdf.values.len() { 0.5 } else { 1.0 };
        acc += w * (-s * cdf.t(i)).exp() * (1.0 - v);
    }
    1.0 - s * acc * dt
}

/// Closed-form busy-period CDF for the constant-β family:
/// B(t) = 1 - ((λ+β)/λ)(1-e^{-ρ}) e^{-e^{-ρ}(λ+β)t}, an atom at the origin
/// of mass 1-(λ+β)(1-e^{-ρ})/λ mixed with an exponential law.
pub fn busy_cdf_beta(lambda: f64, rho: f64, beta: f64, t: f64) -> Result<f64> {
    for (name, v) in [("lambda", lambda), ("rho", rho)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                constraint: "must be a positive finite real",
            });
        }
    }
    let upper = lambda / rho.exp_m1();
    if !(beta >= -lambda && beta <= upper) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            constraint: "must lie in [-lambda, lambda/(e^rho - 1)]",
        });
    }
    if t < 0.0 {
        return Err(Error::Domain { what: format!("time {t} must be nonnegative") });
    }
    let q = -(-rho).exp_m1();
    let b = lambda + beta;
    Ok(1.0 - (b / lambda) * q * (-(-rho).exp() * b * t).exp())
}

/// Heavy-traffic exponential approximation B(t) ≈ 1 - (1-e^{-ρ})e^{-λe^{-ρ}t}.
pub fn busy_cdf_heavy_traffic(lambda: f64, rho: f64, t: f64) -> f64 {
    let q = -(-rho).exp_m1();
    1.0 - q * (-lambda * (-rho).exp() * t).exp()
}

/// Mean of the heavy-traffic approximating exponential, e^ρ/λ; mixing with
/// the origin atom recovers the exact busy-period mean (e^ρ-1)/λ.
pub fn heavy_traffic_mean(lambda: f64, rho: f64) -> f64 {
    rho.exp() / lambda
}

/// Busy-period CDF through the convolution series on a uniform grid.
///
/// The kernel density h is discretized, renormalized to unit mass, and its
/// convolution powers accumulate with geometric weights (1-e^{-ρ})ⁿ. The
/// series truncates when the weighted on-grid contribution of the remaining
/// terms falls below the error budget; terms whose mass has drifted past
/// t_max stop contributing on-grid, which bounds the term count even when
/// (1-e^{-ρ})ⁿ decays slowly.
pub fn busy_cdf_series(config: &QueueConfig, settings: &SeriesSettings) -> Result<SeriesCdf> {
    let lambda = config.lambda;
    let rho = config.rho();
    let q = -(-rho).exp_m1();
    let dt = settings.resolve_dt(config);
    if !(dt > 0.0) || !(settings.t_max > dt) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: settings.t_max,
            constraint: "grid must contain at least two steps",
        });
    }
    let n_points = (settings.t_max / dt).round() as usize + 1;

    if q >= 1.0 {
        // e^{-rho} underflowed: every geometric weight is 1 and the series
        // cannot be truncated; substitute the heavy-traffic form
        let values = (0..n_points)
            .map(|i| busy_cdf_heavy_traffic(lambda, rho, dt * i as f64))
            .collect();
        return Ok(SeriesCdf {
            grid: GridFunction { t0: 0.0, dt, values, kind: GridKind::Cdf },
            terms_used: 0,
            series_tail_bound: f64::NAN,
            fell_back_to_heavy_traffic: true,
        });
    }

    // kernel density on the grid
    let service = &config.service;
    let mut h: Vec<f64> = (0..n_points)
        .map(|i| {
            let t = dt * i as f64;
            (-lambda * service.integrated_tail_unchecked(t)).exp()
                * lambda
                * service.survival_unchecked(t)
                / q
        })
        .collect();
    let mass = trapezoid_mass(&h, dt);
    if !(mass > 0.8) {
        return Err(Error::Accuracy {
            context: format!(
                "series grid t_max = {} captures only {mass:.3} of the kernel mass; extend the grid",
                settings.t_max
            ),
            best_estimate: mass,
            est_error: 1.0 - mass,
        });
    }
    for v in &mut h {
        *v /= mass;
    }

    let budget = 0.5e-8;
    let h_max = h.iter().cloned().fold(0.0, f64::max);
    let cap = match settings.n_terms {
        NTerms::Fixed(n) => n.max(1),
        NTerms::Auto => {
            // a-priori geometric bound: sup h^{*n} <= sup h, and the dropped
            // weights sum to q^{N+1}/(1-q)
            let mut n = 1usize;
            let mut tail_weight = q * q / (1.0 - q);
            while n < N_TERMS_CAP && tail_weight * h_max / lambda > budget {
                n += 1;
                tail_weight *= q;
            }
            n
        }
    };

    let mut acc = vec![0.0f64; n_points];
    let mut power: Vec<f64> = h.clone();
    let mut weight = q;
    let mut terms_used = 0;
    let mut tail_bound = f64::INFINITY;
    for _ in 0..cap {
        for (a, p) in acc.iter_mut().zip(&power) {
            *a += weight * p;
        }
        terms_used += 1;
        weight *= q;
        power = convolve_trapezoid(&power, &h, dt);
        let on_grid_max = power.iter().cloned().fold(0.0, f64::max);
        tail_bound = weight / (1.0 - q) * on_grid_max / lambda;
        if tail_bound <= budget {
            break;
        }
    }

    let values = acc
        .iter()
        .map(|&m| (1.0 - m / lambda).clamp(0.0, 1.0))
        .collect();
    Ok(SeriesCdf {
        grid: GridFunction { t0: 0.0, dt, values, kind: GridKind::Cdf },
        terms_used,
        series_tail_bound: tail_bound,
        fell_back_to_heavy_traffic: false,
    })
}

fn trapezoid_mass(v: &[f64], dt: f64) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let inner: f64 = v[1..v.len() - 1].iter().sum();
    dt * (inner + 0.5 * (v[0] + v[v.len() - 1]))
}

/// Discrete convolution of two densities on the shared grid, trapezoid
/// weights on the inner integral; out[0] = 0 for continuous densities.
fn convolve_trapezoid(f: &[f64], g: &[f64], dt: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0f64; n];
    for i in 1..n {
        let mut s = 0.5 * (f[0] * g[i] + f[i] * g[0]);
        for j in 1..i {
            s += f[j] * g[i - j];
        }
        out[i] = s * dt;
    }
    out
}
