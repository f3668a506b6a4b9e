//! Sets of matrix entries whose spread is limited by one signaling degree.

use serde::Serialize;

use crate::metrics::Direction;
use crate::model::{Marginal, SettingLabel};
use crate::scalar::{max_of, min_of, Scalar};
use crate::svetlichny::AssignmentMatrix;

/// One marginal at a fixed local context, across the settings that differ
/// only in the remote parties' choices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkageGroup {
    pub marginal: Marginal,
    /// Local setting of each party the marginal involves.
    pub local_settings: Vec<u8>,
    pub members: Vec<SettingLabel>,
}

impl LinkageGroup {
    pub fn direction(&self) -> Direction {
        Direction::of_marginal(self.marginal)
    }

    pub fn slot(&self) -> usize {
        self.marginal.slot()
    }

    /// Largest difference between two linked entries.
    pub fn shift<T: Scalar>(&self, m: &AssignmentMatrix<T>) -> T {
        let values = self.members.iter().map(|l| m.row(*l)[self.slot()].clone());
        let hi = max_of(values.clone()).expect("nonempty group");
        let lo = min_of(values).expect("nonempty group");
        hi - lo
    }

    pub fn label(&self) -> String {
        let local: Vec<String> = self
            .marginal
            .parties()
            .iter()
            .zip(&self.local_settings)
            .map(|(p, x)| format!("x{p}={x}"))
            .collect();
        format!("m{}[{}]", self.slot() + 1, local.join(","))
    }
}

/// All 18 groups: two per single-party marginal, four per pair marginal.
pub fn linkage_groups() -> Vec<LinkageGroup> {
    let mut groups = Vec::with_capacity(18);
    for marginal in Marginal::ALL {
        let parties = marginal.parties();
        let combos: Vec<Vec<u8>> = if parties.len() == 1 {
            vec![vec![0], vec![1]]
        } else {
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        };
        for local in combos {
            let members = SettingLabel::ALL
                .into_iter()
                .filter(|l| {
                    let ctx = l.context();
                    parties.iter().zip(&local).all(|(p, x)| ctx.setting(*p) == *x)
                })
                .collect();
            groups.push(LinkageGroup {
                marginal,
                local_settings: local,
                members,
            });
        }
    }
    groups
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupShift {
    pub group: String,
    pub direction: String,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionShift {
    pub direction: String,
    pub shift: f64,
}

/// Signaling budget consumed by a matrix, per group and per direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consumption {
    pub groups: Vec<GroupShift>,
    pub directions: Vec<DirectionShift>,
    pub overall: f64,
}

impl Consumption {
    pub fn direction(&self, d: Direction) -> f64 {
        let name = d.to_string();
        self.directions
            .iter()
            .find(|s| s.direction == name)
            .map(|s| s.shift)
            .unwrap_or(0.0)
    }
}

pub fn consumption<T: Scalar>(m: &AssignmentMatrix<T>) -> Consumption {
    let groups: Vec<GroupShift> = linkage_groups()
        .iter()
        .map(|g| GroupShift {
            group: g.label(),
            direction: g.direction().to_string(),
            shift: g.shift(m).to_f64().unwrap_or(f64::NAN),
        })
        .collect();
    let directions: Vec<DirectionShift> = Direction::ALL
        .iter()
        .map(|d| {
            let name = d.to_string();
            let shift = groups
                .iter()
                .filter(|g| g.direction == name)
                .fold(0.0f64, |acc, g| acc.max(g.shift));
            DirectionShift { direction: name, shift }
        })
        .collect();
    let overall = directions.iter().fold(0.0f64, |acc, d| acc.max(d.shift));
    Consumption {
        groups,
        directions,
        overall,
    }
}
