use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use svrelax::bounds::{
    bound, bound_curves, compare_with_reference, ghz_requirements, requirements_for, CurveRow, GhzRequirement,
    RequirementComparison, Scenario,
};
use svrelax::document::{read_behavior, write_behavior};
use svrelax::error::OracleError;
use svrelax::metrics::{
    complementarity_check_with, indeterminism_degrees_with, signaling_degrees, Complementarity, Direction,
    IndeterminismDegrees, PairIndeterminism, SignalingDegrees,
};
use svrelax::oracle::{minimize_j, OracleConfig, OracleReport, SearchMode};
use svrelax::quantum::{ghz_behavior, ghz_svetlichny, maximize_svetlichny, offset_ansatz, EquatorialAngles, Maximum};

const VALIDATION: u8 = 2;
const INFEASIBLE: u8 = 3;
const MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "svrelax", version)]
#[command(about = "Relaxed Svetlichny bounds under limited indeterminism and signaling")]
struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signaling and indeterminism degrees of a behavior file
    Metrics {
        file: PathBuf,
        /// Normalization tolerance used when reading the file
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// How pair indeterminism reduces a pair marginal: min | plus-plus
        #[arg(long, default_value = "min")]
        pair_rule: String,
    },
    /// Closed-form bound on the Svetlichny value
    Bound(Budget),
    /// Minimal indeterminism and signaling that reproduce GHZ correlations
    Requirements {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        scenario: Option<Scenario>,
        #[arg(long)]
        all: bool,
        /// Violation to reproduce (default: 4 sqrt 2 - 4)
        #[arg(long)]
        violation: Option<f64>,
    },
    /// Bound curves below the gap as CSV with columns I,X,Y,Z
    Figure1 {
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        /// Output path (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the penalty functional and compare with the closed form
    Oracle {
        #[command(flatten)]
        budget: Budget,
        /// endpoint | grid
        #[arg(long, default_value = "endpoint")]
        mode: SearchMode,
        /// Lattice spacing for grid mode
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// GHZ correlations: emit a behavior file or maximize the Svetlichny value
    Ghz {
        #[arg(long, conflicts_with = "maximize", required_unless_present = "maximize")]
        emit: Option<PathBuf>,
        #[arg(long)]
        maximize: bool,
        /// Coarse grid step for the angle search, in radians
        #[arg(long, default_value_t = std::f64::consts::PI / 24.0)]
        resolution: f64,
    },
}

#[derive(Args)]
struct Budget {
    #[arg(long)]
    indeterminism: f64,
    #[arg(long)]
    signaling: f64,
    #[arg(long)]
    scenario: Scenario,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(e: impl std::fmt::Display) -> Self {
        Failure {
            code: VALIDATION,
            message: e.to_string(),
        }
    }
}

/// Rendered output plus the exit status it carries.
struct Outcome {
    text: String,
    code: u8,
}

fn render<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> String {
    if json {
        serde_json::to_string_pretty(value).expect("serializable output") + "\n"
    } else {
        text()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let json = cli.json;
    let ok = |text| Ok(Outcome { text, code: 0 });
    match &cli.command {
        Command::Metrics {
            file,
            tolerance,
            pair_rule,
        } => {
            let rule = match pair_rule.as_str() {
                "min" => PairIndeterminism::MinOverOutcomes,
                "plus-plus" => PairIndeterminism::PlusPlusOnly,
                other => return Err(Failure::validation(format!("unknown pair rule {other:?}"))),
            };
            let b = read_behavior(file, *tolerance).map_err(Failure::validation)?;
            let report = MetricsReport {
                signaling: signaling_degrees(&b).map_err(Failure::validation)?,
                indeterminism: indeterminism_degrees_with(&b, rule).map_err(Failure::validation)?,
                complementarity: complementarity_check_with(&b, rule).map_err(Failure::validation)?,
            };
            ok(render(json, &report, || metrics_text(&report)))
        }
        Command::Bound(budget) => {
            let value = bound(budget.indeterminism, budget.signaling, budget.scenario).map_err(Failure::validation)?;
            let doc = BoundReport {
                scenario: budget.scenario,
                indeterminism: budget.indeterminism,
                signaling: budget.signaling,
                bound: value,
            };
            ok(render(json, &doc, || format!("{value}\n")))
        }
        Command::Requirements {
            scenario,
            all,
            violation,
        } => {
            let scenarios = if *all { Scenario::ALL.to_vec() } else { scenario.iter().copied().collect() };
            let mut rows = Vec::new();
            for sc in scenarios {
                let computed = match violation {
                    Some(v) => requirements_for(*v, sc).map_err(Failure::validation)?,
                    None => ghz_requirements(sc),
                };
                rows.extend(computed.into_iter().map(|r| RequirementRow {
                    reference: if violation.is_none() { compare_with_reference(&r) } else { None },
                    requirement: r,
                }));
            }
            ok(render(json, &rows, || requirements_text(&rows)))
        }
        Command::Figure1 { step, out } => {
            let rows = bound_curves(*step).map_err(Failure::validation)?;
            let csv = figure_csv(&rows);
            match out {
                Some(path) => {
                    fs::write(path, &csv).map_err(|e| Failure {
                        code: 1,
                        message: format!("cannot write {}: {e}", path.display()),
                    })?;
                    let summary = FigureSummary {
                        rows: rows.len(),
                        path: path.display().to_string(),
                    };
                    ok(render(json, &summary, || format!("wrote {} rows to {}\n", summary.rows, summary.path)))
                }
                None => ok(csv),
            }
        }
        Command::Oracle {
            budget,
            mode,
            step,
            node_limit,
            threads,
        } => {
            let mut cfg = OracleConfig {
                mode: *mode,
                grid_step: *step,
                ..OracleConfig::default()
            };
            if let Some(n) = node_limit {
                cfg.node_limit = *n;
            }
            if let Some(t) = threads {
                cfg.parallel_width = *t;
            }
            let report = minimize_j(budget.indeterminism, budget.signaling, budget.scenario, &cfg).map_err(|e| {
                let code = match e {
                    OracleError::InfeasibleConstraints | OracleError::BudgetExceeded { .. } => INFEASIBLE,
                    _ => VALIDATION,
                };
                Failure {
                    code,
                    message: e.to_string(),
                }
            })?;
            Ok(Outcome {
                text: render(json, &report, || oracle_text(&report)),
                code: if report.matches { 0 } else { MISMATCH },
            })
        }
        Command::Ghz {
            emit,
            maximize,
            resolution,
        } => {
            if *maximize {
                if !(*resolution > 0.0 && resolution.is_finite()) {
                    return Err(Failure::validation(format!("resolution must be positive, got {resolution}")));
                }
                let m = maximize_svetlichny(*resolution, true);
                return ok(render(json, &m, || maximum_text(&m)));
            }
            let path = emit.as_ref().expect("clap enforces --emit or --maximize");
            let angles = offset_ansatz(5.0 * std::f64::consts::PI / 12.0);
            let b = ghz_behavior(&angles);
            write_behavior(path, &b).map_err(|e| Failure {
                code: 1,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            let doc = EmitReport {
                path: path.display().to_string(),
                angles,
                svetlichny: ghz_svetlichny(&angles),
            };
            ok(render(json, &doc, || {
                format!("wrote GHZ behavior to {} (Svetlichny value {:.4})\n", doc.path, doc.svetlichny)
            }))
        }
    }
}

#[derive(Serialize)]
struct MetricsReport {
    signaling: SignalingDegrees<f64>,
    indeterminism: IndeterminismDegrees<f64>,
    complementarity: Complementarity<f64>,
}

#[derive(Serialize)]
struct BoundReport {
    scenario: Scenario,
    indeterminism: f64,
    signaling: f64,
    bound: f64,
}

#[derive(Serialize)]
struct RequirementRow {
    requirement: GhzRequirement,
    reference: Option<RequirementComparison>,
}

#[derive(Serialize)]
struct FigureSummary {
    rows: usize,
    path: String,
}

#[derive(Serialize)]
struct EmitReport {
    path: String,
    angles: EquatorialAngles,
    svetlichny: f64,
}

fn metrics_text(r: &MetricsReport) -> String {
    let mut s = String::from("signaling\n");
    for d in Direction::ALL {
        let _ = writeln!(s, "  {:<6} {:.4}", d.to_string(), r.signaling.get(d));
    }
    let _ = writeln!(s, "  overall {:.4}", r.signaling.overall);
    s.push_str("indeterminism\n");
    for (name, v) in ["12", "13", "23"].iter().zip(&r.indeterminism.pair) {
        let _ = writeln!(s, "  I_{name}   {v:.4}");
    }
    for (k, v) in r.indeterminism.single.iter().enumerate() {
        let _ = writeln!(s, "  I_{}    {v:.4}", k + 1);
    }
    let _ = writeln!(s, "  overall {:.4}", r.indeterminism.overall);
    let verdict = if r.complementarity.holds { "holds" } else { "violated" };
    let _ = writeln!(s, "complementarity I >= min(S, (1-S)/2): {verdict}");
    s
}

fn requirements_text(rows: &[RequirementRow]) -> String {
    let mut s = format!(
        "{:<13} {:<7} {:>8} {:>8} {:>8} {:>8}  {}\n",
        "scenario", "band", "I_V", "S_V", "C(S_V)", "local", "valid"
    );
    for row in rows {
        let r = &row.requirement;
        let band = r.band.map(|b| format!("{b:?}").to_lowercase()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<13} {:<7} {:>8.4} {:>8.4} {:>8.4} {:>8.4}  {}",
            r.scenario.to_string(),
            band,
            r.i_v,
            r.s_v,
            r.signaling_bits,
            r.local_bits,
            r.valid
        );
        if let Some(c) = &row.reference {
            let local = c.reference.local_bits.map(|v| format!("{v:>8.2}")).unwrap_or_else(|| format!("{:>8}", "-"));
            let _ = writeln!(
                s,
                "{:<13} {:<7} {:>8.2} {:>8.2} {:>8.2} {}  largest delta {:.4}",
                "  published",
                "",
                c.reference.i_v,
                c.reference.s_v,
                c.reference.signaling_bits,
                local,
                c.worst_delta
            );
        }
    }
    s
}

/// Decimal rendering with 17 significant digits.
fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn figure_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("I,X,Y,Z\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sig17(r.indeterminism),
            sig17(r.simultaneous),
            sig17(r.send),
            sig17(r.receive)
        );
    }
    s
}

fn oracle_text(r: &OracleReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "regime          {}", r.regime);
    let _ = writeln!(s, "J_min           {:.4}", r.j_min);
    let _ = writeln!(s, "closed-form J   {:.4}", r.closed_form_j);
    let _ = writeln!(s, "bound (8 - 2J)  {:.4}", r.bound_from_oracle);
    let _ = writeln!(s, "closed form     {:.4}", r.closed_form_bound);
    let _ = writeln!(s, "matches         {}", r.matches);
    s.push_str("assignment (rows: settings 1-8, columns: m1..m6)\n");
    for (k, row) in r.matrix.m.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(s, "  {}  {}", k + 1, cells.join("  "));
    }
    s.push_str("signaling consumed\n");
    for d in &r.consumption.directions {
        let _ = writeln!(s, "  {:<6} {:.4}", d.direction, d.shift);
    }
    let _ = writeln!(
        s,
        "nodes {}, LP solves {}, {:.1} ms",
        r.nodes, r.leaf_solves, r.wall_time_ms
    );
    s
}

fn maximum_text(m: &Maximum) -> String {
    let mut s = format!("maximum Svetlichny value {:.7}\n", m.value);
    for (k, pair) in m.angles.phi.iter().enumerate() {
        let _ = writeln!(s, "  party {}: phi = {:.6}, phi' = {:.6}", k + 1, pair[0], pair[1]);
    }
    let _ = writeln!(s, "{} grid points, {} refinement sweeps", m.grid_points, m.sweeps);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(4.0), "4.0000000000000000");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(20.0 / 3.0), "6.6666666666666670");
    }
}
