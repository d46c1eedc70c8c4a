//! `busyq` — busy-period statistics of the M/G/∞ queue from the command line.
//!
//! Subcommands: `moments`, `shape`, `cdf`, `lst`, `simulate`, `table`.
//! Exit codes: 0 success, 1 usage error, 2 computation error, 3 golden-table
//! mismatch.

mod render;

use busyq::distributions::{parse_spec, QueueConfig, ServiceDistribution};
use busyq::moments::{self, MomentSet, Provenance};
use busyq::quadrature::{Horizon, QuadratureSettings, TailPolicy};
use busyq::simulate::{sample_busy_periods, SimulationPlan};
use busyq::tables::{self, TableId};
use busyq::transforms::{self, NTerms, SeriesSettings};
use clap::{Args, Parser, Subcommand, ValueEnum};
use render::{Format, Renderer};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_GOLDEN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "busyq",
    version,
    about = "Busy-period moments, shape statistics, CDFs and simulation for the M/G/inf queue",
    after_help = "Distribution specs: det:alpha=1  exp:alpha=1  pow:c=4  pareto3:k=0.667\n\
                  paretok:theta=1.667  beta:lambda=1,rho=1,beta=0  table:path=FILE.csv"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    format: Format,

    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    /// Absolute quadrature tolerance
    #[arg(long, global = true)]
    abs_tol: Option<f64>,

    /// Truncation horizon for semi-infinite integrals: `auto` or a number
    #[arg(long, global = true)]
    horizon: Option<String>,

    /// Behavior on divergent tails / horizon-cap overruns
    #[arg(long, global = true, value_enum)]
    tail_policy: Option<TailPolicyArg>,

    /// Random seed (simulate)
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TailPolicyArg {
    /// Fail on divergent tails
    Error,
    /// Keep effective values and flag the divergence
    Truncate,
}

#[derive(Args)]
struct DistArgs {
    /// Service-time distribution specification
    #[arg(long)]
    dist: String,

    /// Arrival rate; for `beta:` specs it defaults to the family's lambda
    #[arg(long)]
    lambda: Option<f64>,

    /// Traffic intensity; alternative to --lambda (lambda = rho / mean)
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Raw busy-period moments E[B^1..B^n]
    Moments {
        #[command(flatten)]
        dist: DistArgs,
        /// Highest moment order
        #[arg(long, short = 'n', default_value_t = 4)]
        n: usize,
    },
    /// Shape statistics (coefficient of variation, symmetry, kurtosis)
    Shape {
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Busy-period CDF on a time grid
    Cdf {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_enum, default_value_t = CdfMethod::Series)]
        method: CdfMethod,
        /// Grid extent
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Grid step (default min(alpha, 1/lambda)/200)
        #[arg(long)]
        dt: Option<f64>,
        /// Convolution terms (default automatic)
        #[arg(long)]
        n_terms: Option<usize>,
    },
    /// Laplace–Stieltjes transform values
    Lst {
        #[command(flatten)]
        dist: DistArgs,
        /// Comma-separated transform arguments
        #[arg(long, default_value = "0.1,0.5,1,2,5")]
        s: String,
    },
    /// Monte Carlo busy-period sampling
    Simulate {
        #[command(flatten)]
        dist: DistArgs,
        /// Number of busy periods
        #[arg(long, default_value_t = 100_000)]
        periods: usize,
        /// Safety cap on service starts per period
        #[arg(long, default_value_t = 10_000_000)]
        max_events: usize,
    },
    /// Recompute a reference table against embedded golden values
    Table {
        /// Table id (T3.1, T4.1, T5.1, T6.1, T7.1, T7.2, T8.1..T8.6) or `all`
        id: String,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CdfMethod {
    Series,
    BetaClosed,
    HeavyTraffic,
}

/// Errors split by exit-code class.
enum CliError {
    Usage(String),
    Compute(String),
}

impl From<busyq::Error> for CliError {
    fn from(e: busyq::Error) -> Self {
        match e {
            busyq::Error::Spec { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version exit zero; real usage errors exit 1
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(m)) => {
            eprintln!("busyq: usage error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Compute(m)) => {
            eprintln!("busyq: {m}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}

fn quad_settings(cli: &Cli) -> Result<QuadratureSettings, busyq::Error> {
    let mut s = QuadratureSettings::default();
    if let Some(r) = cli.rel_tol {
        s.rel_tol = r;
    }
    if let Some(a) = cli.abs_tol {
        s.abs_tol = a;
    }
    if let Some(h) = &cli.horizon {
        s.truncation_horizon = if h.eq_ignore_ascii_case("auto") {
            Horizon::Auto
        } else {
            let v: f64 = h.parse().map_err(|_| busyq::Error::Spec {
                spec: h.clone(),
                what: "horizon must be `auto` or a positive number".into(),
            })?;
            Horizon::Fixed(v)
        };
    }
    if let Some(p) = cli.tail_policy {
        s.tail_policy = match p {
            TailPolicyArg::Error => TailPolicy::ErrorIfDivergent,
            TailPolicyArg::Truncate => TailPolicy::TruncateAndWarn,
        };
    }
    Ok(s)
}

/// Resolve (lambda, service) from the spec string and --lambda/--rho flags.
fn resolve_config(args: &DistArgs) -> Result<QueueConfig, String> {
    let service = parse_spec(&args.dist).map_err(|e| e.to_string())?;
    if let ServiceDistribution::BetaFamily { lambda, rho, .. } = service {
        if let Some(l) = args.lambda {
            if (l - lambda).abs() > 1e-12 * lambda.max(1.0) {
                return Err(format!(
                    "--lambda {l} conflicts with the beta family's lambda = {lambda}"
                ));
            }
        }
        if let Some(r) = args.rho {
            if (r - rho).abs() > 1e-12 * rho.max(1.0) {
                return Err(format!(
                    "--rho {r} conflicts with the beta family's rho = {rho}"
                ));
            }
        }
        return QueueConfig::new(lambda, service).map_err(|e| e.to_string());
    }
    let mean = service.mean();
    let lambda = match (args.lambda, args.rho) {
        (Some(l), None) => l,
        (None, Some(r)) => r / mean,
        (Some(l), Some(r)) => {
            if (l * mean - r).abs() > 1e-9 * r.abs().max(1.0) {
                return Err(format!(
                    "--lambda {l} and --rho {r} disagree (rho = lambda * {mean})"
                ));
            }
            l
        }
        (None, None) => {
            return Err("one of --lambda or --rho is required for this distribution".into())
        }
    };
    QueueConfig::new(lambda, service).map_err(|e| e.to_string())
}

/// Engine choice: closed form for the beta family, analytic recurrence for
/// deterministic service, quadrature recurrence otherwise.
fn compute_moments(
    config: &QueueConfig,
    n: usize,
    settings: &QuadratureSettings,
) -> busyq::Result<MomentSet> {
    match &config.service {
        ServiceDistribution::BetaFamily { lambda, rho, beta } => {
            moments::closed_moments_beta(*lambda, *rho, *beta, n)
        }
        ServiceDistribution::Deterministic { alpha } => {
            let c = moments::c_derivatives_deterministic(config.lambda, *alpha, n)?;
            moments::moments_recurrence(&c, config.lambda, config.rho(), n)
        }
        _ => {
            let c = moments::c_derivatives_quadrature(config, n, settings)?;
            moments::moments_recurrence(&c, config.lambda, config.rho(), n)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let settings = quad_settings(cli)?;
    let out = Renderer::new(cli.format);
    match &cli.command {
        Command::Moments { dist, n } => {
            let config = resolve_config(dist).map_err(CliError::Usage)?;
            let m = compute_moments(&config, (*n).max(1), &settings)?;
            out.moments(&config, &m);
            Ok(0)
        }
        Command::Shape { dist } => {
            let config = resolve_config(dist).map_err(CliError::Usage)?;
            let m = compute_moments(&config, 4, &settings)?;
            let stats = if settings.tail_policy == TailPolicy::TruncateAndWarn {
                moments::shape_stats_truncated(&m)?
            } else {
                moments::shape_stats(&m)?
            };
            out.shape(&config, &m, &stats);
            Ok(0)
        }
        Command::Cdf { dist, method, t_max, dt, n_terms } => {
            let config = resolve_config(dist).map_err(CliError::Usage)?;
            match method {
                CdfMethod::Series => {
                    let series_settings = SeriesSettings {
                        dt: *dt,
                        t_max: *t_max,
                        n_terms: n_terms.map_or(NTerms::Auto, NTerms::Fixed),
                    };
                    let series = transforms::busy_cdf_series(&config, &series_settings)?;
                    out.cdf_grid(&series.grid, Some(&series));
                }
                CdfMethod::BetaClosed => {
                    let ServiceDistribution::BetaFamily { lambda, rho, beta } = config.service
                    else {
                        return Err(CliError::Usage(
                            "--method beta-closed applies only to beta: distributions".into(),
                        ));
                    };
                    let grid = closed_grid(*t_max, dt.unwrap_or(t_max / 400.0), |t| {
                        transforms::busy_cdf_beta(lambda, rho, beta, t)
                    })?;
                    out.cdf_grid(&grid, None);
                }
                CdfMethod::HeavyTraffic => {
                    let (lambda, rho) = (config.lambda, config.rho());
                    let grid = closed_grid(*t_max, dt.unwrap_or(t_max / 400.0), |t| {
                        Ok(transforms::busy_cdf_heavy_traffic(lambda, rho, t))
                    })?;
                    out.cdf_grid(&grid, None);
                }
            }
            Ok(0)
        }
        Command::Lst { dist, s } => {
            let config = resolve_config(dist).map_err(CliError::Usage)?;
            let mut rows = Vec::new();
            for piece in s.split(',') {
                let sv: f64 = piece
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad transform argument `{piece}`")))?;
                rows.push((sv, transforms::lst_busy_period(&config, sv, &settings)?));
            }
            out.lst(&config, &rows);
            Ok(0)
        }
        Command::Simulate { dist, periods, max_events } => {
            let config = resolve_config(dist).map_err(CliError::Usage)?;
            let plan = SimulationPlan {
                config: config.clone(),
                n_busy_periods: *periods,
                seed: cli.seed,
                max_events_per_period: *max_events,
            };
            let report = sample_busy_periods(&plan)?;
            out.simulation(&config, &plan, &report);
            Ok(0)
        }
        Command::Table { id } => {
            let ids: Vec<TableId> = if id.eq_ignore_ascii_case("all") {
                TableId::all().to_vec()
            } else {
                vec![TableId::parse(id)
                    .ok_or_else(|| CliError::Usage(format!("unknown table id `{id}`")))?]
            };
            let mut all_pass = true;
            for tid in ids {
                let report = tables::evaluate_with(tid, &settings)?;
                all_pass &= report.golden_pass;
                out.table(&report);
            }
            Ok(if all_pass { 0 } else { EXIT_GOLDEN })
        }
    }
}

fn closed_grid(
    t_max: f64,
    dt: f64,
    f: impl Fn(f64) -> busyq::Result<f64>,
) -> busyq::Result<busyq::transforms::GridFunction> {
    let n = (t_max / dt).round() as usize + 1;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(f(dt * i as f64)?);
    }
    Ok(busyq::transforms::GridFunction {
        t0: 0.0,
        dt,
        values,
        kind: busyq::transforms::GridKind::Cdf,
    })
}

/// Provenance shown to users.
pub(crate) fn provenance_label(p: Provenance) -> &'static str {
    match p {
        Provenance::ClosedFormG1 => "closed-form-g1",
        Provenance::ClosedFormBeta => "closed-form-beta",
        Provenance::RecurrenceAnalyticC => "recurrence-analytic",
        Provenance::RecurrenceQuadratureC => "recurrence-quadrature",
        Provenance::ExponentialReference => "exponential-reference",
        Provenance::MonteCarlo => "monte-carlo",
    }
}
