//! Degrees of signaling and indeterminism of a behavior.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{validate_behavior, Behavior, Marginal, OutcomeDistribution, Party, SettingLabel};
use crate::scalar::{frac, lit, max2, min2, Scalar};

/// A signaling direction between a single party and the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// `S_{i->jk}`: party `i`'s setting shifts the pair marginal of the others.
    OneToPair(Party),
    /// `S_{ij->k}`: the other two settings shift party `k`'s marginal.
    PairToOne(Party),
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::OneToPair(Party::Alice),
        Direction::OneToPair(Party::Bob),
        Direction::OneToPair(Party::Charlie),
        Direction::PairToOne(Party::Alice),
        Direction::PairToOne(Party::Bob),
        Direction::PairToOne(Party::Charlie),
    ];

    /// The parametrization marginal whose shifts this direction measures.
    pub fn marginal(self) -> Marginal {
        match self {
            Direction::OneToPair(Party::Alice) => Marginal::PairBobCharlie,
            Direction::OneToPair(Party::Bob) => Marginal::PairAliceCharlie,
            Direction::OneToPair(Party::Charlie) => Marginal::PairAliceBob,
            Direction::PairToOne(Party::Alice) => Marginal::Alice,
            Direction::PairToOne(Party::Bob) => Marginal::Bob,
            Direction::PairToOne(Party::Charlie) => Marginal::Charlie,
        }
    }

    pub fn of_marginal(m: Marginal) -> Direction {
        match m {
            Marginal::PairBobCharlie => Direction::OneToPair(Party::Alice),
            Marginal::PairAliceCharlie => Direction::OneToPair(Party::Bob),
            Marginal::PairAliceBob => Direction::OneToPair(Party::Charlie),
            Marginal::Alice => Direction::PairToOne(Party::Alice),
            Marginal::Bob => Direction::PairToOne(Party::Bob),
            Marginal::Charlie => Direction::PairToOne(Party::Charlie),
        }
    }

    /// Whether two contexts are compared by this direction's supremum.
    pub fn links(self, a: SettingLabel, b: SettingLabel) -> bool {
        if a == b {
            return false;
        }
        let (x, y) = (a.context(), b.context());
        match self {
            Direction::OneToPair(i) => {
                let (j, k) = i.others();
                x.setting(j) == y.setting(j) && x.setting(k) == y.setting(k)
            }
            Direction::PairToOne(k) => x.setting(k) == y.setting(k),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::OneToPair(i) => {
                let (j, k) = i.others();
                write!(f, "{i}->{j}{k}")
            }
            Direction::PairToOne(k) => {
                let (i, j) = k.others();
                write!(f, "{i}{j}->{k}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalingDegrees<T> {
    /// `S_{i->jk}` indexed by sender `i`.
    pub one_to_pair: [T; 3],
    /// `S_{ij->k}` indexed by receiver `k`.
    pub pair_to_one: [T; 3],
    pub overall: T,
}

impl<T: Scalar> SignalingDegrees<T> {
    pub fn get(&self, d: Direction) -> &T {
        match d {
            Direction::OneToPair(p) => &self.one_to_pair[p.index()],
            Direction::PairToOne(p) => &self.pair_to_one[p.index()],
        }
    }
}

/// How the pair degree `I_ij` reduces the four joint-outcome probabilities
/// of one pair marginal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairIndeterminism {
    /// Minimum of `min(p, 1-p)` over all four outcomes.
    #[default]
    MinOverOutcomes,
    /// `min(p, 1-p)` of the `(+,+)` entry only.
    PlusPlusOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndeterminismDegrees<T> {
    /// `I_ij` for the pairs (1,2), (1,3), (2,3).
    pub pair: [T; 3],
    /// `I_i` for parties 1, 2, 3.
    pub single: [T; 3],
    pub overall: T,
}

pub const PAIRS: [(Party, Party); 3] = [
    (Party::Alice, Party::Bob),
    (Party::Alice, Party::Charlie),
    (Party::Bob, Party::Charlie),
];

fn abs_diff<T: Scalar>(a: &T, b: &T) -> T {
    (a.clone() - b.clone()).abs()
}

fn linked_pairs(d: Direction) -> impl Iterator<Item = (SettingLabel, SettingLabel)> {
    SettingLabel::ALL.into_iter().flat_map(move |a| {
        SettingLabel::ALL
            .into_iter()
            .filter(move |b| a < *b && d.links(a, *b))
            .map(move |b| (a, b))
    })
}

fn degree_unchecked<T: Scalar>(b: &Behavior<T>, d: Direction) -> T {
    let marginal = |t: &OutcomeDistribution<T>| -> Vec<T> {
        match d {
            Direction::OneToPair(i) => {
                let (j, k) = i.others();
                t.pair(j, k).to_vec()
            }
            Direction::PairToOne(k) => t.single(k).to_vec(),
        }
    };
    let mut sup = T::zero();
    for state in &b.states {
        for (x, y) in linked_pairs(d) {
            let (px, py) = (marginal(state.table(x)), marginal(state.table(y)));
            for (u, v) in px.iter().zip(&py) {
                sup = max2(sup, abs_diff(u, v));
            }
        }
    }
    sup
}

/// `S_{i->jk}`.
pub fn signaling_one_to_pair<T: Scalar>(b: &Behavior<T>, sender: Party) -> Result<T, ModelError> {
    validate_behavior(b)?;
    Ok(degree_unchecked(b, Direction::OneToPair(sender)))
}

/// `S_{ij->k}`.
pub fn signaling_pair_to_one<T: Scalar>(b: &Behavior<T>, receiver: Party) -> Result<T, ModelError> {
    validate_behavior(b)?;
    Ok(degree_unchecked(b, Direction::PairToOne(receiver)))
}

pub fn signaling_degrees<T: Scalar>(b: &Behavior<T>) -> Result<SignalingDegrees<T>, ModelError> {
    validate_behavior(b)?;
    let one_to_pair = Party::ALL.map(|p| degree_unchecked(b, Direction::OneToPair(p)));
    let pair_to_one = Party::ALL.map(|p| degree_unchecked(b, Direction::PairToOne(p)));
    let overall = one_to_pair
        .iter()
        .chain(pair_to_one.iter())
        .cloned()
        .fold(T::zero(), max2);
    Ok(SignalingDegrees {
        one_to_pair,
        pair_to_one,
        overall,
    })
}

/// `S`, the largest of the six directional degrees.
pub fn overall_signaling<T: Scalar>(b: &Behavior<T>) -> Result<T, ModelError> {
    Ok(signaling_degrees(b)?.overall)
}

fn distance_to_deterministic<T: Scalar>(p: &T) -> T {
    min2(p.clone(), T::one() - p.clone())
}

pub fn indeterminism_degrees<T: Scalar>(b: &Behavior<T>) -> Result<IndeterminismDegrees<T>, ModelError> {
    indeterminism_degrees_with(b, PairIndeterminism::default())
}

pub fn indeterminism_degrees_with<T: Scalar>(
    b: &Behavior<T>,
    rule: PairIndeterminism,
) -> Result<IndeterminismDegrees<T>, ModelError> {
    validate_behavior(b)?;
    let mut pair: [T; 3] = std::array::from_fn(|_| T::zero());
    let mut single: [T; 3] = std::array::from_fn(|_| T::zero());
    for state in &b.states {
        for table in &state.tables {
            for (slot, (i, j)) in PAIRS.iter().enumerate() {
                let probs = table.pair(*i, *j);
                let value = match rule {
                    PairIndeterminism::MinOverOutcomes => probs
                        .iter()
                        .map(distance_to_deterministic)
                        .reduce(min2)
                        .expect("four outcomes"),
                    PairIndeterminism::PlusPlusOnly => distance_to_deterministic(&probs[0]),
                };
                pair[slot] = max2(pair[slot].clone(), value);
            }
            for party in Party::ALL {
                // min(p, 1-p) is the same for both outcomes of one party.
                let [plus, _] = table.single(party);
                let k = party.index();
                single[k] = max2(single[k].clone(), distance_to_deterministic(&plus));
            }
        }
    }
    let overall = pair.iter().chain(single.iter()).cloned().fold(T::zero(), max2);
    Ok(IndeterminismDegrees { pair, single, overall })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Complementarity<T> {
    pub indeterminism: T,
    pub signaling: T,
    /// `I >= min(S, (1 - S)/2)` up to `1e-12`.
    pub holds: bool,
}

pub fn complementarity_check<T: Scalar>(b: &Behavior<T>) -> Result<Complementarity<T>, ModelError> {
    complementarity_check_with(b, PairIndeterminism::default())
}

pub fn complementarity_check_with<T: Scalar>(
    b: &Behavior<T>,
    rule: PairIndeterminism,
) -> Result<Complementarity<T>, ModelError> {
    let indeterminism = indeterminism_degrees_with(b, rule)?.overall;
    let signaling = overall_signaling(b)?;
    let floor = min2(signaling.clone(), (T::one() - signaling.clone()) * frac(1, 2));
    let holds = indeterminism >= floor - lit(1e-12);
    Ok(Complementarity {
        indeterminism,
        signaling,
        holds,
    })
}
