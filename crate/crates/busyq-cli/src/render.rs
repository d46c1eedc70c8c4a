//! CSV / JSON / markdown rendering of command results.

use busyq::distributions::QueueConfig;
use busyq::moments::MomentSet;
use busyq::simulate::{SimulationPlan, SimulationReport};
use busyq::special::SciValue;
use busyq::tables::{CellStatus, TableReport};
use busyq::transforms::{GridFunction, SeriesCdf};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

pub struct Renderer {
    format: Format,
}

#[derive(Serialize)]
struct MomentsDoc<'a> {
    lambda: f64,
    rho: f64,
    provenance: &'a str,
    divergent_from: Option<usize>,
    moments: Vec<MomentRow>,
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    mantissa: f64,
    exp10: i32,
    ln_value: f64,
    divergent: bool,
}

#[derive(Serialize)]
struct ShapeDoc<'a> {
    lambda: f64,
    rho: f64,
    provenance: &'a str,
    delta1: f64,
    delta2: f64,
    delta3: f64,
    truncation_dependent: bool,
}

#[derive(Serialize)]
struct CdfDoc<'a> {
    dt: f64,
    terms_used: Option<usize>,
    series_tail_bound: Option<f64>,
    fell_back_to_heavy_traffic: Option<bool>,
    points: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct SimDoc<'a> {
    lambda: f64,
    rho: f64,
    n_busy_periods: usize,
    seed: u64,
    count: usize,
    moments: [f64; 4],
    standard_errors: [f64; 4],
    truncated_periods: usize,
    infinite_moment_orders: &'a [usize],
    empirical_cdf: &'a GridFunction,
}

impl Renderer {
    pub fn new(format: Format) -> Renderer {
        Renderer { format }
    }

    pub fn moments(&self, config: &QueueConfig, m: &MomentSet) {
        let rows: Vec<MomentRow> = (1..=m.n_max())
            .map(|n| {
                let sci = m.sci(n);
                MomentRow {
                    n,
                    mantissa: sci.mantissa,
                    exp10: sci.exp10,
                    ln_value: m.ln_moment(n),
                    divergent: m.is_divergent(n),
                }
            })
            .collect();
        let doc = MomentsDoc {
            lambda: config.lambda,
            rho: config.rho(),
            provenance: crate::provenance_label(m.provenance),
            divergent_from: m.divergent_from,
            moments: rows,
        };
        match self.format {
            Format::Json => json(&doc),
            Format::Csv => {
                println!("n,value,ln_value,divergent");
                for r in &doc.moments {
                    println!(
                        "{},{},{},{}",
                        r.n,
                        sci_str(r.mantissa, r.exp10),
                        r.ln_value,
                        r.divergent
                    );
                }
            }
            Format::Markdown => {
                println!(
                    "busy-period moments: lambda = {}, rho = {}, engine = {}",
                    doc.lambda, doc.rho, doc.provenance
                );
                println!();
                println!("| n | E[B^n] | divergent |");
                println!("|---|--------|-----------|");
                for r in &doc.moments {
                    println!(
                        "| {} | {} | {} |",
                        r.n,
                        sci_str(r.mantissa, r.exp10),
                        if r.divergent { "yes (truncated)" } else { "" }
                    );
                }
            }
        }
    }

    pub fn shape(&self, config: &QueueConfig, m: &MomentSet, s: &busyq::ShapeStats) {
        let doc = ShapeDoc {
            lambda: config.lambda,
            rho: config.rho(),
            provenance: crate::provenance_label(m.provenance),
            delta1: s.delta1,
            delta2: s.delta2,
            delta3: s.delta3,
            truncation_dependent: m.divergent_from.map_or(false, |k| k <= 4),
        };
        match self.format {
            Format::Json => json(&doc),
            Format::Csv => {
                println!("delta1,delta2,delta3");
                println!("{:.8},{:.8},{:.8}", doc.delta1, doc.delta2, doc.delta3);
            }
            Format::Markdown => {
                println!(
                    "shape statistics: lambda = {}, rho = {}, engine = {}{}",
                    doc.lambda,
                    doc.rho,
                    doc.provenance,
                    if doc.truncation_dependent {
                        " (truncation-dependent: divergent moments)"
                    } else {
                        ""
                    }
                );
                println!();
                println!("| delta1 (cv) | delta2 (symmetry) | delta3 (kurtosis) |");
                println!("|------------|-------------------|-------------------|");
                println!("| {:.7} | {:.7} | {:.7} |", doc.delta1, doc.delta2, doc.delta3);
            }
        }
    }

    pub fn cdf_grid(&self, grid: &GridFunction, series: Option<&SeriesCdf>) {
        let points: Vec<(f64, f64)> =
            (0..grid.len()).map(|i| (grid.t(i), grid.values[i])).collect();
        let doc = CdfDoc {
            dt: grid.dt,
            terms_used: series.map(|s| s.terms_used),
            series_tail_bound: series.map(|s| s.series_tail_bound),
            fell_back_to_heavy_traffic: series.map(|s| s.fell_back_to_heavy_traffic),
            points,
            note: None,
        };
        match self.format {
            Format::Json => json(&doc),
            Format::Csv => {
                println!("t,B");
                for (t, b) in &doc.points {
                    println!("{t},{b}");
                }
            }
            Format::Markdown => {
                if let Some(s) = series {
                    println!(
                        "convolution series: {} terms, tail bound {:.2e}{}",
                        s.terms_used,
                        s.series_tail_bound,
                        if s.fell_back_to_heavy_traffic {
                            " [fell back to heavy-traffic form]"
                        } else {
                            ""
                        }
                    );
                    println!();
                }
                println!("| t | B(t) |");
                println!("|---|------|");
                for (t, b) in &doc.points {
                    println!("| {t:.6} | {b:.8} |");
                }
            }
        }
    }

    pub fn lst(&self, config: &QueueConfig, rows: &[(f64, f64)]) {
        match self.format {
            Format::Json => {
                #[derive(Serialize)]
                struct LstDoc {
                    lambda: f64,
                    rho: f64,
                    values: Vec<(f64, f64)>,
                }
                json(&LstDoc {
                    lambda: config.lambda,
                    rho: config.rho(),
                    values: rows.to_vec(),
                });
            }
            Format::Csv => {
                println!("s,lst");
                for (s, v) in rows {
                    println!("{s},{v}");
                }
            }
            Format::Markdown => {
                println!(
                    "Laplace-Stieltjes transform: lambda = {}, rho = {}",
                    config.lambda,
                    config.rho()
                );
                println!();
                println!("| s | B~(s) |");
                println!("|---|-------|");
                for (s, v) in rows {
                    println!("| {s} | {v:.10} |");
                }
            }
        }
    }

    pub fn simulation(
        &self,
        config: &QueueConfig,
        plan: &SimulationPlan,
        report: &SimulationReport,
    ) {
        let doc = SimDoc {
            lambda: config.lambda,
            rho: config.rho(),
            n_busy_periods: plan.n_busy_periods,
            seed: plan.seed,
            count: report.samples_summary.count,
            moments: report.samples_summary.moments,
            standard_errors: report.samples_summary.standard_errors,
            truncated_periods: report.truncated_periods,
            infinite_moment_orders: &report.infinite_moment_orders,
            empirical_cdf: &report.empirical_cdf,
        };
        match self.format {
            Format::Json => json(&doc),
            Format::Csv => {
                println!("order,sample_moment,standard_error,population_infinite");
                for k in 0..4 {
                    println!(
                        "{},{},{},{}",
                        k + 1,
                        doc.moments[k],
                        doc.standard_errors[k],
                        doc.infinite_moment_orders.contains(&(k + 1))
                    );
                }
            }
            Format::Markdown => {
                println!(
                    "simulation: lambda = {}, rho = {}, periods = {}, seed = {}, truncated = {}",
                    doc.lambda, doc.rho, doc.count, doc.seed, doc.truncated_periods
                );
                println!();
                println!("| order | sample moment | standard error | note |");
                println!("|-------|---------------|----------------|------|");
                for k in 0..4 {
                    let note = if doc.infinite_moment_orders.contains(&(k + 1)) {
                        "population moment infinite"
                    } else {
                        ""
                    };
                    println!(
                        "| {} | {:.8e} | {:.3e} | {} |",
                        k + 1,
                        doc.moments[k],
                        doc.standard_errors[k],
                        note
                    );
                }
            }
        }
    }

    pub fn table(&self, report: &TableReport) {
        match self.format {
            Format::Json => json(report),
            Format::Csv => {
                println!("table,row,col,computed,paper,rel_err,status,pass,note");
                for c in &report.cells {
                    println!(
                        "{},{},{},{},{},{},{},{},{}",
                        report.id,
                        c.row,
                        c.col,
                        sci_str(c.computed.mantissa, c.computed.exp10),
                        c.paper.map_or(String::new(), |p| format!("{p:e}")),
                        c.rel_err.map_or(String::new(), |r| format!("{r:.2e}")),
                        status_label(c.status),
                        c.pass.map_or(String::new(), |p| p.to_string()),
                        c.note.as_deref().unwrap_or("").replace(',', ";"),
                    );
                }
            }
            Format::Markdown => {
                println!("## {} — {}", report.id, report.label);
                println!();
                println!("| row | column | computed | paper | rel err | status | check |");
                println!("|-----|--------|----------|-------|---------|--------|-------|");
                for c in &report.cells {
                    let check = match (c.status, c.pass) {
                        (CellStatus::Golden, Some(true)) => "pass".to_string(),
                        (CellStatus::Golden, Some(false)) => "FAIL".to_string(),
                        (CellStatus::SuspectedErratum, _) => "informational".to_string(),
                        (CellStatus::TruncationDependent, _) => "informational".to_string(),
                        _ => String::new(),
                    };
                    println!(
                        "| {} | {} | {} | {} | {} | {} | {} |",
                        c.row,
                        c.col,
                        sci_str(c.computed.mantissa, c.computed.exp10),
                        c.paper.map_or("—".into(), |p| format!("{p:.7e}")),
                        c.rel_err.map_or("—".into(), |r| format!("{r:.1e}")),
                        status_label(c.status),
                        check
                    );
                }
                println!();
                let failed: Vec<String> = report
                    .failed_golden()
                    .map(|c| format!("({}, {})", c.row, c.col))
                    .collect();
                if failed.is_empty() {
                    println!("{}: all golden cells pass", report.id);
                } else {
                    println!("{}: FAILED golden cells: {}", report.id, failed.join(", "));
                }
                for c in &report.cells {
                    if let Some(note) = &c.note {
                        println!("  note ({}, {}): {}", c.row, c.col, note);
                    }
                }
                println!();
            }
        }
    }
}

fn status_label(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Golden => "golden",
        CellStatus::SuspectedErratum => "suspected-erratum",
        CellStatus::TruncationDependent => "truncation-dependent",
    }
}

fn sci_str(mantissa: f64, exp10: i32) -> String {
    format!("{}", SciValue { mantissa, exp10 })
}

fn json<T: Serialize>(doc: &T) {
    println!("{}", serde_json::to_string_pretty(doc).expect("serializable"));
}
