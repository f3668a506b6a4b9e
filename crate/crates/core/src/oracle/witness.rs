//! Explicit marginal assignments that attain the lower bounds on `J`.

use serde::Serialize;

use crate::bounds::{Band, Scenario};
use crate::error::OracleError;
use crate::model::c_bounds;
use crate::oracle::linkage::{consumption, linkage_groups, Consumption};
use crate::oracle::{GapSide, Regime};
use crate::scalar::{frac, int, to_f64, Scalar};
use crate::svetlichny::{j_functional, AssignmentMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessAssignment<T> {
    pub regime: Regime,
    pub indeterminism: T,
    pub m: AssignmentMatrix<T>,
    pub expected_j: T,
}

/// Slots of m1..m6 for readability of the tables below.
const M1: usize = 0;
const M2: usize = 1;
const M3: usize = 2;
const M4: usize = 3;
const M5: usize = 4;
const M6: usize = 5;

fn band_j<T: Scalar>(band: Band, i: &T) -> T {
    match band {
        Band::Low => int::<T>(2) * (T::one() - int::<T>(3) * i.clone()),
        Band::Middle => int::<T>(6) * (T::one() - int::<T>(4) * i.clone()),
        Band::High => T::zero(),
    }
}

fn low_band<T: Scalar>(i: &T) -> AssignmentMatrix<T> {
    let hi = T::one() - i.clone();
    AssignmentMatrix::from_fn(|row, j| match (row < 6, j) {
        (true, M4) => i.clone(),
        (true, M6) => hi.clone(),
        (true, _) => T::zero(),
        (false, M2) => T::zero(),
        (false, M6) => hi.clone(),
        (false, _) => i.clone(),
    })
}

fn middle_band<T: Scalar>(i: &T) -> AssignmentMatrix<T> {
    let hi = T::one() - i.clone();
    let mut m = AssignmentMatrix::zeros();
    // Label rows: label k sits in row k - 1.
    m.m[0][M4] = i.clone();
    m.m[0][M5] = hi.clone();
    m.m[3][M4] = T::one();
    m.m[3][M5] = T::zero();
    for row in [1, 5] {
        m.m[row][M4] = i.clone();
        m.m[row][M6] = hi.clone();
    }
    for row in [2, 4] {
        m.m[row][M6] = hi.clone();
        for j in [M1, M2, M3] {
            m.m[row][j] = i.clone();
        }
    }
    m.m[2][M4] = T::zero();
    m.m[2][M5] = hi.clone();
    m.m[4][M4] = hi;
    m.m[4][M5] = T::zero();
    m
}

fn high_band<T: Scalar>(i: &T) -> AssignmentMatrix<T> {
    let hi = T::one() - i.clone();
    let pair = frac::<T>(1, 2) - i.clone();
    let mut m = AssignmentMatrix::zeros();
    for row in 0..6 {
        for j in [M1, M2, M3] {
            m.m[row][j] = pair.clone();
        }
        let zero_slot = match row {
            0 | 3 => M6,
            1 | 4 => M5,
            _ => M4,
        };
        for j in [M4, M5, M6] {
            m.m[row][j] = if j == zero_slot { T::zero() } else { hi.clone() };
        }
    }
    m
}

fn split_above<T: Scalar>(i: &T) -> AssignmentMatrix<T> {
    let hi = T::one() - i.clone();
    AssignmentMatrix::from_fn(|row, j| match (row < 6, j) {
        (true, M4) => i.clone(),
        (true, M5) => hi.clone(),
        _ => T::zero(),
    })
}

fn send_below<T: Scalar>(i: &T) -> AssignmentMatrix<T> {
    let hi = T::one() - i.clone();
    AssignmentMatrix::from_fn(|row, j| match (row < 6, j) {
        (_, M4) => i.clone(),
        (_, M5) => hi.clone(),
        (false, M2) => i.clone(),
        _ => T::zero(),
    })
}

/// The literal assignment for a regime at indeterminism `I`.
pub fn witness_assignment<T: Scalar>(regime: Regime, i: T) -> Result<WitnessAssignment<T>, OracleError> {
    if i < T::zero() || i >= frac(1, 2) {
        return Err(OracleError::RegimeMismatch {
            indeterminism: to_f64(&i),
            band: "[0, 1/2)".into(),
        });
    }
    let (m, expected_j) = match (regime.scenario, regime.gap) {
        (Scenario::Simultaneous, GapSide::Below) => {
            let band = regime.band.ok_or_else(|| OracleError::RegimeMismatch {
                indeterminism: to_f64(&i),
                band: "no band given".into(),
            })?;
            if !band.contains(&i) {
                return Err(OracleError::RegimeMismatch {
                    indeterminism: to_f64(&i),
                    band: band.range().into(),
                });
            }
            let m = match band {
                Band::Low => low_band(&i),
                Band::Middle => middle_band(&i),
                Band::High => high_band(&i),
            };
            (m, band_j(band, &i))
        }
        (Scenario::Simultaneous, GapSide::AtOrAbove) => (split_above(&i), T::zero()),
        (Scenario::RestrictedSend, GapSide::Below) => {
            (send_below(&i), int::<T>(2) * (T::one() - int::<T>(2) * i.clone()))
        }
        (Scenario::RestrictedSend, GapSide::AtOrAbove) => (split_above(&i), T::zero()),
        (Scenario::RestrictedReceive, _) => return Err(OracleError::UnsupportedRegime(regime.to_string())),
    };
    Ok(WitnessAssignment {
        regime,
        indeterminism: i,
        m,
        expected_j,
    })
}

/// Every regime that has a literal witness.
pub fn witness_regimes() -> Vec<Regime> {
    vec![
        Regime::simultaneous(Band::Low),
        Regime::simultaneous(Band::Middle),
        Regime::simultaneous(Band::High),
        Regime::above(Scenario::Simultaneous),
        Regime::below(Scenario::RestrictedSend),
        Regime::above(Scenario::RestrictedSend),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryIssue {
    pub label: u8,
    pub marginal: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub regime: Regime,
    pub indeterminism: f64,
    /// Every entry lies in `[0, I]` or `[1 - I, 1]`.
    pub membership: bool,
    pub outside: Vec<EntryIssue>,
    pub j_value: f64,
    pub expected_j: f64,
    pub j_matches: bool,
    /// Per setting: some `c` completes the row to a distribution.
    pub realizable: [bool; 8],
    /// No linkage group has members on both sides of the gap.
    pub gap_respected: bool,
    /// Every group the scenario forbids has zero shift.
    pub scenario_respected: bool,
    pub consumption: Consumption,
}

pub fn verify_witness<T: Scalar>(w: &WitnessAssignment<T>, i: &T, tolerance: &T) -> WitnessReport {
    let hi = T::one() - i.clone();
    let low = |v: &T| *v >= T::zero() && *v <= i.clone();
    let high = |v: &T| *v >= hi && *v <= T::one();
    let mut outside = Vec::new();
    for (row, values) in w.m.m.iter().enumerate() {
        for (slot, v) in values.iter().enumerate() {
            if !(low(v) || high(v)) {
                outside.push(EntryIssue {
                    label: row as u8 + 1,
                    marginal: slot + 1,
                    value: to_f64(v),
                });
            }
        }
    }
    let j = j_functional(&w.m);
    let j_matches = (j.clone() - w.expected_j.clone()).abs() <= *tolerance;
    let realizable = std::array::from_fn(|row| {
        let (lo, up) = c_bounds(&w.m.m[row]);
        lo <= up
    });
    let groups = linkage_groups();
    let gap_respected = groups.iter().all(|g| {
        let sides: Vec<bool> = g.members.iter().map(|l| high(&w.m.row(*l)[g.slot()])).collect();
        sides.iter().all(|s| *s == sides[0])
    });
    let scenario_respected = groups
        .iter()
        .filter(|g| !w.regime.scenario.permits(g.direction()))
        .all(|g| g.shift(&w.m) == T::zero());
    WitnessReport {
        regime: w.regime,
        indeterminism: to_f64(i),
        membership: outside.is_empty(),
        outside,
        j_value: to_f64(&j),
        expected_j: to_f64(&w.expected_j),
        j_matches,
        realizable,
        gap_respected,
        scenario_respected,
        consumption: consumption(&w.m),
    }
}
