//! Closed-form relaxed Svetlichny bounds, minimal relaxations and the
//! information cost of signaling.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::BoundsError;
use crate::metrics::Direction;
use crate::model::Party;
use crate::scalar::{frac, int, to_f64, Scalar};

/// Which signaling directions a relaxation allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Every direction between a pair and the remaining party.
    Simultaneous,
    /// Charlie signals to the pair (1,2), and each of Alice and Bob, together
    /// with Charlie, signals to the other.
    #[serde(rename = "send")]
    RestrictedSend,
    /// The pair (1,2) signals to Charlie, and each of Alice and Bob signals
    /// to the pair it forms with Charlie.
    #[serde(rename = "receive")]
    RestrictedReceive,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Simultaneous, Scenario::RestrictedSend, Scenario::RestrictedReceive];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Simultaneous => "simultaneous",
            Scenario::RestrictedSend => "send",
            Scenario::RestrictedReceive => "receive",
        }
    }

    pub fn permits(self, d: Direction) -> bool {
        use Direction::*;
        use Party::*;
        match self {
            Scenario::Simultaneous => true,
            Scenario::RestrictedSend => matches!(d, OneToPair(Charlie) | PairToOne(Alice) | PairToOne(Bob)),
            Scenario::RestrictedReceive => matches!(d, PairToOne(Charlie) | OneToPair(Alice) | OneToPair(Bob)),
        }
    }

    pub fn permitted(self) -> Vec<Direction> {
        Direction::ALL.into_iter().filter(|d| self.permits(*d)).collect()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simultaneous" => Ok(Scenario::Simultaneous),
            "send" => Ok(Scenario::RestrictedSend),
            "receive" => Ok(Scenario::RestrictedReceive),
            other => Err(format!("unknown scenario {other:?} (expected simultaneous, send or receive)")),
        }
    }
}

/// Indeterminism bands of the simultaneous scenario below the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// `0 <= I <= 2/9`
    Low,
    /// `2/9 <= I < 1/4`
    Middle,
    /// `1/4 <= I < 1/2`
    High,
}

impl Band {
    pub fn of<T: Scalar>(indeterminism: &T) -> Band {
        if *indeterminism <= frac(2, 9) {
            Band::Low
        } else if *indeterminism < frac(1, 4) {
            Band::Middle
        } else {
            Band::High
        }
    }

    /// Whether `I` lies in the closed-open range printed for the band.
    pub fn contains<T: Scalar>(self, indeterminism: &T) -> bool {
        let i = indeterminism;
        match self {
            Band::Low => *i >= T::zero() && *i <= frac(2, 9),
            Band::Middle => *i >= frac(2, 9) && *i < frac(1, 4),
            Band::High => *i >= frac(1, 4) && *i < frac(1, 2),
        }
    }

    pub fn range(self) -> &'static str {
        match self {
            Band::Low => "[0, 2/9]",
            Band::Middle => "[2/9, 1/4)",
            Band::High => "[1/4, 1/2)",
        }
    }
}

/// An indeterminism/signaling allowance under one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationBudget<T> {
    pub indeterminism: T,
    pub signaling: T,
    pub scenario: Scenario,
}

impl<T: Scalar> RelaxationBudget<T> {
    pub fn new(indeterminism: T, signaling: T, scenario: Scenario) -> Result<Self, BoundsError> {
        if indeterminism < T::zero() || indeterminism >= frac(1, 2) {
            return Err(BoundsError::Domain {
                name: "I",
                value: to_f64(&indeterminism),
                range: "[0, 1/2)",
            });
        }
        if signaling < T::zero() || signaling > T::one() {
            return Err(BoundsError::Domain {
                name: "S",
                value: to_f64(&signaling),
                range: "[0, 1]",
            });
        }
        Ok(Self {
            indeterminism,
            signaling,
            scenario,
        })
    }

    /// `S < 1 - 2I`: marginals cannot move between `[0, I]` and `[1-I, 1]`.
    pub fn below_gap(&self) -> bool {
        self.signaling < T::one() - int::<T>(2) * self.indeterminism.clone()
    }
}

/// `4 + 12I` and `48I - 4`, the two rising pieces of the simultaneous bound.
pub fn simultaneous_pieces<T: Scalar>(indeterminism: &T) -> (T, T) {
    let i = indeterminism.clone();
    (int::<T>(4) + int::<T>(12) * i.clone(), int::<T>(48) * i - int::<T>(4))
}

/// Largest Svetlichny value reachable within the budget.
pub fn relaxed_bound<T: Scalar>(budget: &RelaxationBudget<T>) -> T {
    if !budget.below_gap() {
        return int(8);
    }
    let i = budget.indeterminism.clone();
    match budget.scenario {
        Scenario::Simultaneous => {
            let (first, second) = simultaneous_pieces(&i);
            match Band::of(&i) {
                Band::Low => first,
                Band::Middle => second,
                Band::High => int(8),
            }
        }
        Scenario::RestrictedSend => int::<T>(4) + int::<T>(8) * i,
        Scenario::RestrictedReceive => int::<T>(4) + int::<T>(4) * i,
    }
}

/// [`relaxed_bound`] from loose arguments.
pub fn bound<T: Scalar>(indeterminism: T, signaling: T, scenario: Scenario) -> Result<T, BoundsError> {
    Ok(relaxed_bound(&RelaxationBudget::new(indeterminism, signaling, scenario)?))
}

/// The penalty `J` matching a bound through `bound = 8 - 2J`.
pub fn closed_form_j<T: Scalar>(budget: &RelaxationBudget<T>) -> T {
    (int::<T>(8) - relaxed_bound(budget)) / int(2)
}

/// `4 sqrt(2) - 4`, the amount by which GHZ correlations exceed 4.
pub fn ghz_violation() -> f64 {
    4.0 * std::f64::consts::SQRT_2 - 4.0
}

/// One solution `(I_V, S_V)` of `bound = 4 + V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationBranch<T> {
    pub band: Option<Band>,
    pub i_v: T,
    pub s_v: T,
    /// Whether `I_V` falls inside the band the formula was derived for.
    pub valid: bool,
}

pub fn minimal_relaxation<T: Scalar>(violation: T, scenario: Scenario) -> Result<Vec<RelaxationBranch<T>>, BoundsError> {
    if violation <= T::zero() || violation > int(4) {
        return Err(BoundsError::Domain {
            name: "V",
            value: to_f64(&violation),
            range: "(0, 4]",
        });
    }
    Ok(relaxation_branches(violation, scenario))
}

fn relaxation_branches<T: Scalar>(v: T, scenario: Scenario) -> Vec<RelaxationBranch<T>> {
    let gap = |i: &T| T::one() - int::<T>(2) * i.clone();
    let half: T = frac(1, 2);
    match scenario {
        Scenario::Simultaneous => {
            let first = v.clone() / int(12);
            let second = frac::<T>(1, 6) + v / int(48);
            [(Band::Low, first), (Band::Middle, second)]
                .into_iter()
                .map(|(band, i_v)| RelaxationBranch {
                    band: Some(band),
                    s_v: gap(&i_v),
                    valid: band.contains(&i_v),
                    i_v,
                })
                .collect()
        }
        Scenario::RestrictedSend | Scenario::RestrictedReceive => {
            let i_v = if scenario == Scenario::RestrictedSend {
                v / int(8)
            } else {
                v / int(4)
            };
            vec![RelaxationBranch {
                band: None,
                s_v: gap(&i_v),
                valid: i_v >= T::zero() && i_v < half,
                i_v,
            }]
        }
    }
}

/// `H(p)` in bits, with `0 log 0 = 0`.
pub fn binary_entropy<F: Float>(p: F) -> F {
    let term = |x: F| if x <= F::zero() { F::zero() } else { -x * x.log2() };
    term(p) + term(F::one() - p)
}

/// Mutual information between a fair choice of two settings and a binary
/// outcome with `P(+) = p` or `p + S`.
pub fn mutual_info_shift<F: Float>(p: F, shift: F) -> F {
    let two = F::one() + F::one();
    let q = p + shift;
    binary_entropy((p + q) / two) - (binary_entropy(p) + binary_entropy(q)) / two
}

/// `C(S) = 1 - H((1 - S)/2)`.
pub fn channel_capacity<F: Float>(shift: F) -> F {
    let two = F::one() + F::one();
    F::one() - binary_entropy((F::one() - shift) / two)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzRequirement {
    pub scenario: Scenario,
    pub band: Option<Band>,
    pub i_v: f64,
    pub s_v: f64,
    pub signaling_bits: f64,
    pub local_bits: f64,
    pub valid: bool,
}

/// Minimal budgets and their bit costs for a violation `V`.
pub fn requirements_for(violation: f64, scenario: Scenario) -> Result<Vec<GhzRequirement>, BoundsError> {
    let branches = if violation == 0.0 {
        relaxation_branches(0.0, scenario)
    } else {
        minimal_relaxation(violation, scenario)?
    };
    Ok(branches
        .into_iter()
        .map(|b| {
            let signaling_bits = channel_capacity(b.s_v);
            GhzRequirement {
                scenario,
                band: b.band,
                i_v: b.i_v,
                s_v: b.s_v,
                signaling_bits,
                local_bits: 1.0 - signaling_bits,
                valid: b.valid,
            }
        })
        .collect())
}

pub fn ghz_requirements(scenario: Scenario) -> Vec<GhzRequirement> {
    requirements_for(ghz_violation(), scenario).expect("GHZ violation lies in (0, 4]")
}

/// Two-decimal reference figures for the GHZ requirements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceFigures {
    pub scenario: Scenario,
    pub band: Option<Band>,
    pub i_v: f64,
    pub s_v: f64,
    pub signaling_bits: f64,
    pub local_bits: Option<f64>,
}

pub const REFERENCE_FIGURES: [ReferenceFigures; 4] = [
    ReferenceFigures {
        scenario: Scenario::Simultaneous,
        band: Some(Band::Low),
        i_v: 0.13,
        s_v: 0.72,
        signaling_bits: 0.43,
        local_bits: None,
    },
    ReferenceFigures {
        scenario: Scenario::Simultaneous,
        band: Some(Band::Middle),
        i_v: 0.20,
        s_v: 0.59,
        signaling_bits: 0.71,
        local_bits: None,
    },
    ReferenceFigures {
        scenario: Scenario::RestrictedSend,
        band: None,
        i_v: 0.20,
        s_v: 0.58,
        signaling_bits: 0.27,
        local_bits: Some(0.73),
    },
    ReferenceFigures {
        scenario: Scenario::RestrictedReceive,
        band: None,
        i_v: 0.41,
        s_v: 0.17,
        signaling_bits: 0.03,
        local_bits: Some(0.97),
    },
];

/// A computed requirement next to its reference figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementComparison {
    pub computed: GhzRequirement,
    pub reference: ReferenceFigures,
    pub delta_i_v: f64,
    pub delta_s_v: f64,
    pub delta_signaling_bits: f64,
    pub delta_local_bits: Option<f64>,
    /// Largest absolute delta.
    pub worst_delta: f64,
}

pub fn compare_with_reference(computed: &GhzRequirement) -> Option<RequirementComparison> {
    let reference = *REFERENCE_FIGURES
        .iter()
        .find(|r| r.scenario == computed.scenario && r.band == computed.band)?;
    let delta_i_v = computed.i_v - reference.i_v;
    let delta_s_v = computed.s_v - reference.s_v;
    let delta_signaling_bits = computed.signaling_bits - reference.signaling_bits;
    let delta_local_bits = reference.local_bits.map(|l| computed.local_bits - l);
    let worst_delta = [delta_i_v, delta_s_v, delta_signaling_bits, delta_local_bits.unwrap_or(0.0)]
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()));
    Some(RequirementComparison {
        computed: computed.clone(),
        reference,
        delta_i_v,
        delta_s_v,
        delta_signaling_bits,
        delta_local_bits,
        worst_delta,
    })
}

/// One row of the bound-versus-indeterminism curves below the gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub indeterminism: f64,
    pub simultaneous: f64,
    pub send: f64,
    pub receive: f64,
}

/// Samples `I = 0, h, 2h, ...` below `1/2`, with `S = 0`.
pub fn bound_curves(step: f64) -> Result<Vec<CurveRow>, BoundsError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(BoundsError::Domain {
            name: "step",
            value: step,
            range: "(0, inf)",
        });
    }
    let mut rows = Vec::new();
    let mut k = 0u64;
    loop {
        let i = k as f64 * step;
        if i >= 0.5 {
            break;
        }
        let at = |scenario| bound(i, 0.0, scenario).expect("I in [0, 1/2)");
        rows.push(CurveRow {
            indeterminism: i,
            simultaneous: at(Scenario::Simultaneous),
            send: at(Scenario::RestrictedSend),
            receive: at(Scenario::RestrictedReceive),
        });
        k += 1;
    }
    Ok(rows)
}
