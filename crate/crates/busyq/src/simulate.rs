//! Event-driven Monte Carlo oracle for busy-period functionals.
//!
//! A busy period starts with an arrival to an empty system. With unbounded
//! servers the system empties exactly at the running maximum of departure
//! times, provided no further arrival lands before it, so one pass over the
//! Poisson arrival stream with a running max suffices — no event queue. The
//! construction is exact and shares no code with the analytic paths.

use crate::distributions::{QueueConfig, SurvivalTail};
use crate::error::{Error, Result};
use crate::moments::{MomentSet, Provenance};
use crate::transforms::{GridFunction, GridKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub config: QueueConfig,
    pub n_busy_periods: usize,
    pub seed: u64,
    /// Safety cap on service starts within one busy period.
    pub max_events_per_period: usize,
}

impl SimulationPlan {
    pub fn new(config: QueueConfig, n_busy_periods: usize, seed: u64) -> SimulationPlan {
        SimulationPlan { config, n_busy_periods, seed, max_events_per_period: 10_000_000 }
    }
}

/// Summary statistics of the sampled busy periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesSummary {
    pub count: usize,
    /// Sample raw moments m₁..m₄.
    pub moments: [f64; 4],
    /// Standard errors of the four sample moments.
    pub standard_errors: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub samples_summary: SamplesSummary,
    pub empirical_cdf: GridFunction,
    /// Periods that hit the event cap; excluded from the estimates.
    pub truncated_periods: usize,
    /// Moment orders (<= 4) whose population value is infinite for this
    /// service law; their sample estimates carry no standard error.
    pub infinite_moment_orders: Vec<usize>,
    /// Sorted busy-period lengths, for distribution-level comparisons.
    #[serde(skip)]
    pub sorted_samples: Vec<f64>,
}

impl SimulationReport {
    /// Sample moments as a log-space moment set (Monte Carlo provenance).
    pub fn moment_set(&self, lambda: f64, rho: f64) -> MomentSet {
        MomentSet::from_linear_moments(
            lambda,
            rho,
            &self.samples_summary.moments,
            Provenance::MonteCarlo,
        )
    }
}

/// Draw busy periods and estimate their moments and CDF.
///
/// Identical plans produce bit-identical reports: all randomness flows from
/// a counter-seeded ChaCha stream.
pub fn sample_busy_periods(plan: &SimulationPlan) -> Result<SimulationReport> {
    if plan.n_busy_periods == 0 {
        return Err(Error::InvalidParameter {
            name: "n_busy_periods",
            value: 0.0,
            constraint: "must be at least 1",
        });
    }
    let lambda = plan.config.lambda;
    let service = &plan.config.service;
    let arrivals = Exp::new(lambda).map_err(|_| Error::InvalidParameter {
        name: "lambda",
        value: lambda,
        constraint: "must be positive",
    })?;
    let mut rng = ChaCha12Rng::seed_from_u64(plan.seed);

    let mut samples = Vec::with_capacity(plan.n_busy_periods);
    let mut truncated = 0usize;
    while samples.len() < plan.n_busy_periods {
        // arrival to an empty system at local time 0
        let mut busy_end = draw_service(service, &mut rng)?;
        let mut clock = 0.0f64;
        let mut events = 1usize;
        let complete = loop {
            clock += arrivals.sample(&mut rng);
            if clock >= busy_end {
                break true;
            }
            busy_end = busy_end.max(clock + draw_service(service, &mut rng)?);
            events += 1;
            if events > plan.max_events_per_period {
                break false;
            }
        };
        if complete {
            samples.push(busy_end);
        } else {
            truncated += 1;
            if truncated > plan.n_busy_periods {
                return Err(Error::Degenerate {
                    what: "more truncated periods than requested samples; raise the event cap"
                        .into(),
                });
            }
        }
    }

    let summary = summarize(&samples);
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let empirical_cdf = empirical_cdf_grid(&samples, 400);
    let infinite_moment_orders = match service.survival_tail() {
        SurvivalTail::Power { exponent } => {
            (1..=4usize).filter(|&n| n as f64 >= exponent).collect()
        }
        _ => Vec::new(),
    };
    Ok(SimulationReport {
        samples_summary: summary,
        empirical_cdf,
        truncated_periods: truncated,
        infinite_moment_orders,
        sorted_samples: samples,
    })
}

fn draw_service<R: Rng>(service: &crate::ServiceDistribution, rng: &mut R) -> Result<f64> {
    service.quantile(rng.random::<f64>())
}

fn summarize(samples: &[f64]) -> SamplesSummary {
    let n = samples.len() as f64;
    let mut sums = [0.0f64; 8];
    for &x in samples {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= x;
            *s += p;
        }
    }
    let mean_pow: Vec<f64> = sums.iter().map(|s| s / n).collect();
    let mut moments = [0.0f64; 4];
    let mut se = [0.0f64; 4];
    for k in 1..=4usize {
        moments[k - 1] = mean_pow[k - 1];
        // Var(m_k) = (E[X^{2k}] - E[X^k]^2)/n
        let var = (mean_pow[2 * k - 1] - mean_pow[k - 1] * mean_pow[k - 1]).max(0.0);
        se[k - 1] = (var / n).sqrt();
    }
    SamplesSummary { count: samples.len(), moments, standard_errors: se }
}

fn empirical_cdf_grid(sorted: &[f64], points: usize) -> GridFunction {
    let n = sorted.len();
    let t_max = sorted.last().copied().unwrap_or(0.0);
    let dt = if t_max > 0.0 { t_max / (points - 1) as f64 } else { 1.0 };
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        let t = dt * i as f64;
        let count = sorted.partition_point(|&x| x <= t);
        values.push(count as f64 / n as f64);
    }
    GridFunction { t0: 0.0, dt, values, kind: GridKind::Cdf }
}

/// Two-sided Kolmogorov–Smirnov distance between sorted samples and a CDF.
///
/// Handles tied samples, and a reference CDF whose only jump sits at the
/// origin (the busy-period atom): at t = 0 only the post-jump comparison
/// applies, since the pre-jump gap is measured against F(0⁻) = 0.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0usize;
    while i < sorted.len() {
        let v = sorted[i];
        let below = i;
        let mut upto = i;
        while upto < sorted.len() && sorted[upto] == v {
            upto += 1;
        }
        let f = cdf(v);
        d = d.max((upto as f64 / n - f).abs());
        if v > 0.0 {
            d = d.max((f - below as f64 / n).abs());
        }
        i = upto;
    }
    d
}

/// One-percent critical value of the Kolmogorov statistic, asymptotic form.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627624 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ServiceDistribution;
    use crate::transforms::busy_cdf_beta;

    fn plan(service: ServiceDistribution, lambda: f64, n: usize, seed: u64) -> SimulationPlan {
        SimulationPlan::new(QueueConfig::new(lambda, service).unwrap(), n, seed)
    }

    #[test]
    fn seed_determinism() {
        let p = plan(ServiceDistribution::exponential(1.0).unwrap(), 1.0, 2000, 42);
        let a = sample_busy_periods(&p).unwrap();
        let b = sample_busy_periods(&p).unwrap();
        assert_eq!(a.sorted_samples, b.sorted_samples);
        assert_eq!(a.samples_summary, b.samples_summary);
        let p2 = SimulationPlan { seed: 43, ..p };
        let c = sample_busy_periods(&p2).unwrap();
        assert_ne!(a.sorted_samples, c.sorted_samples);
    }

    #[test]
    fn mean_matches_exponential_service() {
        let p = plan(ServiceDistribution::exponential(1.0).unwrap(), 1.0, 100_000, 7);
        let r = sample_busy_periods(&p).unwrap();
        let expect = 1.0f64.exp_m1();
        let err = (r.samples_summary.moments[0] - expect).abs();
        assert!(
            err <= 3.0 * r.samples_summary.standard_errors[0],
            "mean {} vs {} (se {})",
            r.samples_summary.moments[0],
            expect,
            r.samples_summary.standard_errors[0]
        );
    }

    #[test]
    fn rare_arrival_limit_is_single_service() {
        // rho = 0.01: the busy period is almost surely one bare service, and
        // the exact mean (e^rho - 1)/lambda = 1.00502 sits just above alpha
        let p = plan(ServiceDistribution::deterministic(1.0).unwrap(), 0.01, 20_000, 11);
        let r = sample_busy_periods(&p).unwrap();
        let m = r.samples_summary.moments[0];
        let exact = 0.01f64.exp_m1() / 0.01;
        assert!(
            (m - exact).abs() <= 4.0 * r.samples_summary.standard_errors[0],
            "mean {m} vs exact {exact}"
        );
        assert!((m - 1.0).abs() < 0.02, "rare-arrival limit far from alpha: {m}");
    }

    #[test]
    fn beta_family_ks_against_closed_form() {
        let p = plan(
            ServiceDistribution::beta_family(1.0, 1.0, 0.0).unwrap(),
            1.0,
            100_000,
            5,
        );
        let r = sample_busy_periods(&p).unwrap();
        let d = ks_statistic(&r.sorted_samples, |t| busy_cdf_beta(1.0, 1.0, 0.0, t).unwrap());
        let crit = ks_critical_1pct(r.sorted_samples.len());
        assert!(d < crit, "KS {d} vs critical {crit}");
        // the zero-length busy periods realize the origin atom
        let zeros = r.sorted_samples.iter().filter(|&&x| x == 0.0).count();
        let frac = zeros as f64 / r.sorted_samples.len() as f64;
        assert!((frac - (-1.0f64).exp()).abs() < 0.01, "atom fraction {frac}");
    }

    #[test]
    fn heavy_tail_infinite_moment_warning() {
        let p = plan(
            ServiceDistribution::pareto_fixed_shape(2.0 / 3.0).unwrap(),
            0.5,
            2000,
            3,
        );
        let r = sample_busy_periods(&p).unwrap();
        assert_eq!(r.infinite_moment_orders, vec![3, 4]);
        let p = plan(ServiceDistribution::pareto_fixed_scale(5.0 / 3.0).unwrap(), 0.5, 2000, 3);
        let r = sample_busy_periods(&p).unwrap();
        assert_eq!(r.infinite_moment_orders, vec![2, 3, 4]);
    }

    #[test]
    fn event_cap_counts_truncations() {
        let p = SimulationPlan {
            max_events_per_period: 3,
            ..plan(ServiceDistribution::exponential(1.0).unwrap(), 2.0, 200, 9)
        };
        let r = sample_busy_periods(&p).unwrap();
        assert!(r.truncated_periods > 0);
        assert_eq!(r.samples_summary.count, 200);
    }

    #[test]
    fn empirical_cdf_is_a_cdf() {
        let p = plan(ServiceDistribution::power(4.0).unwrap(), 1.0, 5000, 17);
        let r = sample_busy_periods(&p).unwrap();
        let v = &r.empirical_cdf.values;
        assert!((v.last().unwrap() - 1.0).abs() < 1e-12);
        for w in v.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn ks_statistic_sanity() {
        // perfect match on a uniform grid sample has small distance
        let samples: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        let d = ks_statistic(&samples, |t| t.clamp(0.0, 1.0));
        assert!(d <= 1.0 / 1000.0 + 1e-12);
        // gross mismatch is detected
        let d = ks_statistic(&samples, |_| 0.0);
        assert!(d >= 0.999);
    }
}
