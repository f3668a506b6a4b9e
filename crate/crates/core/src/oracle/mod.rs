//! Exhaustive minimization of the `J` functional under indeterminism and
//! signaling constraints, and the explicit witnesses that attain it.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{closed_form_j, relaxed_bound, Band, RelaxationBudget, Scenario};
use crate::error::OracleError;
use crate::svetlichny::{j_functional, AssignmentMatrix};

mod grid;
pub mod linkage;
mod lp;
mod search;
pub mod witness;

pub use linkage::{consumption, linkage_groups, Consumption, DirectionShift, GroupShift, LinkageGroup};
pub use witness::{verify_witness, witness_assignment, witness_regimes, EntryIssue, WitnessAssignment, WitnessReport};

/// Position of the signaling budget relative to the gap `1 - 2I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapSide {
    /// `S < 1 - 2I`
    Below,
    /// `S >= 1 - 2I`
    AtOrAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Regime {
    pub scenario: Scenario,
    pub gap: GapSide,
    /// Set only for the simultaneous scenario below the gap.
    pub band: Option<Band>,
}

impl Regime {
    pub fn simultaneous(band: Band) -> Regime {
        Regime {
            scenario: Scenario::Simultaneous,
            gap: GapSide::Below,
            band: Some(band),
        }
    }

    pub fn below(scenario: Scenario) -> Regime {
        Regime {
            scenario,
            gap: GapSide::Below,
            band: None,
        }
    }

    pub fn above(scenario: Scenario) -> Regime {
        Regime {
            scenario,
            gap: GapSide::AtOrAbove,
            band: None,
        }
    }

    pub fn of(indeterminism: f64, signaling: f64, scenario: Scenario) -> Regime {
        if signaling >= 1.0 - 2.0 * indeterminism {
            Regime::above(scenario)
        } else if scenario == Scenario::Simultaneous {
            Regime::simultaneous(Band::of(&indeterminism))
        } else {
            Regime::below(scenario)
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gap = match self.gap {
            GapSide::Below => "below the gap",
            GapSide::AtOrAbove => "at or above the gap",
        };
        write!(f, "{} {gap}", self.scenario)?;
        if let Some(band) = self.band {
            write!(f, ", I in {}", band.range())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Exact: every subinterval choice, each solved as a linear program.
    EndpointEnumeration,
    /// Approximate: entries restricted to a lattice of spacing `grid_step`.
    GridSearch,
}

impl std::str::FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "endpoint" | "endpoint_enumeration" => Ok(SearchMode::EndpointEnumeration),
            "grid" | "grid_search" => Ok(SearchMode::GridSearch),
            other => Err(format!("unknown mode {other:?} (expected endpoint or grid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub mode: SearchMode,
    pub grid_step: f64,
    pub tolerance: f64,
    pub parallel_width: usize,
    /// Cap on search nodes across the whole run.
    pub node_limit: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mode: SearchMode::EndpointEnumeration,
            grid_step: 0.005,
            tolerance: 1e-9,
            parallel_width: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            node_limit: 20_000_000,
        }
    }
}

impl OracleConfig {
    pub fn grid(step: f64) -> Self {
        OracleConfig {
            mode: SearchMode::GridSearch,
            grid_step: step,
            ..OracleConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(OracleError::Config(format!("grid_step must be positive, got {}", self.grid_step)));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(OracleError::Config(format!("tolerance must be nonnegative, got {}", self.tolerance)));
        }
        if self.parallel_width == 0 {
            return Err(OracleError::Config("parallel_width must be at least 1".into()));
        }
        Ok(())
    }

    /// Allowed distance between the search result and the closed form.
    pub fn match_tolerance(&self) -> f64 {
        match self.mode {
            SearchMode::EndpointEnumeration => self.tolerance,
            SearchMode::GridSearch => 3.0 * self.grid_step * 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub scenario: Scenario,
    pub indeterminism: f64,
    pub signaling: f64,
    pub regime: Regime,
    pub mode: SearchMode,
    pub grid_step: Option<f64>,
    pub j_min: f64,
    pub matrix: AssignmentMatrix<f64>,
    pub closed_form_j: f64,
    pub closed_form_bound: f64,
    pub bound_from_oracle: f64,
    pub difference: f64,
    pub matches: bool,
    pub consumption: Consumption,
    pub nodes: u64,
    pub leaf_solves: u64,
    pub wall_time_ms: f64,
}

/// Lattice pass that supplies the exact search with a first incumbent.
const SEED_STEP: f64 = 0.01;
const SEED_NODES: u64 = 400;

/// `8 - 2 J_min`, the largest Svetlichny value the search allows.
pub fn bound_from_oracle(report: &OracleReport) -> f64 {
    8.0 - 2.0 * report.j_min
}

/// Minimizes `J` over assignment matrices whose entries lie in
/// `[0, I] ∪ [1 - I, 1]`, whose linked entries differ by at most `S` along
/// permitted directions and not at all along forbidden ones, and which do not
/// cross the gap when `S < 1 - 2I`. Every setting is also required to admit
/// a joint distribution.
pub fn minimize_j(
    indeterminism: f64,
    signaling: f64,
    scenario: Scenario,
    cfg: &OracleConfig,
) -> Result<OracleReport, OracleError> {
    cfg.validate()?;
    let budget = RelaxationBudget::new(indeterminism, signaling, scenario)?;
    let start = Instant::now();
    let problem = search::Problem::new(indeterminism, signaling, scenario);
    let outcome = match cfg.mode {
        SearchMode::EndpointEnumeration => {
            let seed = grid::lattice_incumbent(&problem, SEED_STEP, SEED_NODES);
            search::branch_and_bound(&problem, seed, cfg.node_limit, cfg.tolerance, cfg.parallel_width)
        }
        SearchMode::GridSearch => grid::grid_search(&problem, cfg.grid_step, cfg.node_limit),
    };
    let (value, matrix, stats) = outcome.map_err(|e| match e {
        search::SearchError::Budget => OracleError::BudgetExceeded { limit: cfg.node_limit },
        search::SearchError::Empty => OracleError::InfeasibleConstraints,
    })?;
    let matrix = clean(matrix, indeterminism);
    let j_min = match cfg.mode {
        SearchMode::EndpointEnumeration => value.max(0.0),
        SearchMode::GridSearch => j_functional(&matrix),
    };
    let closed_j = closed_form_j(&budget);
    let difference = j_min - closed_j;
    let mut report = OracleReport {
        scenario,
        indeterminism,
        signaling,
        regime: Regime::of(indeterminism, signaling, scenario),
        mode: cfg.mode,
        grid_step: (cfg.mode == SearchMode::GridSearch).then_some(cfg.grid_step),
        j_min,
        consumption: consumption(&matrix),
        matrix,
        closed_form_j: closed_j,
        closed_form_bound: relaxed_bound(&budget),
        bound_from_oracle: 0.0,
        difference,
        matches: difference.abs() <= cfg.match_tolerance(),
        nodes: stats.nodes,
        leaf_solves: stats.leaves,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    report.bound_from_oracle = bound_from_oracle(&report);
    Ok(report)
}

/// Clamps solver round-off so that entries sit exactly in their subintervals.
fn clean(m: AssignmentMatrix<f64>, i: f64) -> AssignmentMatrix<f64> {
    m.map(|v| {
        let v = v.clamp(0.0, 1.0);
        if v > i && v < 1.0 - i {
            if v - i < 1.0 - i - v {
                i
            } else {
                1.0 - i
            }
        } else {
            v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn endpoint(i: f64, s: f64, sc: Scenario) -> OracleReport {
        minimize_j(i, s, sc, &OracleConfig::default()).unwrap()
    }

    #[test]
    fn low_band_value() {
        let r = endpoint(0.1, 0.35, Scenario::Simultaneous);
        assert!((r.j_min - 1.4).abs() < 1e-9, "{}", r.j_min);
        assert!(r.matches);
        assert!((bound_from_oracle(&r) - 5.2).abs() < 1e-9);
    }

    #[test]
    fn high_indeterminism_below_gap() {
        let r = endpoint(0.3, 0.35, Scenario::Simultaneous);
        assert!((r.j_min - 0.2).abs() < 1e-9, "{}", r.j_min);
        assert!(endpoint(0.2, 0.8, Scenario::Simultaneous).j_min.abs() < 1e-9);
    }

    #[test]
    fn restricted_scenarios() {
        let r = endpoint(0.15, 0.6, Scenario::RestrictedSend);
        assert!((r.j_min - 1.4).abs() < 1e-9, "{}", r.j_min);
        let r = endpoint(0.15, 0.6, Scenario::RestrictedReceive);
        assert!((r.j_min - 1.4).abs() < 1e-9, "{}", r.j_min);
        assert!(!r.matches);
    }

    #[test]
    fn small_signaling_raises_the_minimum() {
        let r = endpoint(0.1, 0.0, Scenario::Simultaneous);
        assert!((r.j_min - 1.6).abs() < 1e-9, "{}", r.j_min);
        let r = endpoint(0.1, 0.02, Scenario::Simultaneous);
        assert!((r.j_min - 1.48).abs() < 1e-9, "{}", r.j_min);
    }

    #[test]
    fn config_errors() {
        let cfg = OracleConfig {
            grid_step: 0.0,
            ..OracleConfig::default()
        };
        assert!(matches!(minimize_j(0.1, 0.1, Scenario::Simultaneous, &cfg), Err(OracleError::Config(_))));
        assert!(matches!(
            minimize_j(0.6, 0.1, Scenario::Simultaneous, &OracleConfig::default()),
            Err(OracleError::Bounds(_))
        ));
        let tiny = OracleConfig {
            node_limit: 3,
            ..OracleConfig::default()
        };
        assert!(matches!(
            minimize_j(0.1, 0.35, Scenario::Simultaneous, &tiny),
            Err(OracleError::BudgetExceeded { limit: 3 })
        ));
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Regime::of(0.1, 0.35, Scenario::Simultaneous), Regime::simultaneous(Band::Low));
        assert_eq!(Regime::of(0.1, 0.8, Scenario::RestrictedSend), Regime::above(Scenario::RestrictedSend));
        assert_eq!(Regime::of(0.3, 0.1, Scenario::RestrictedReceive), Regime::below(Scenario::RestrictedReceive));
        assert_eq!(Regime::simultaneous(Band::Low).to_string(), "simultaneous below the gap, I in [0, 2/9]");
    }
}
