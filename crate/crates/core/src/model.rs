//! Tripartite behaviors and the `(c, m1..m6)` parametrization of a single
//! setting's joint outcome distribution.
//!
//! Orderings are fixed throughout the crate:
//!
//! * outcomes `(a1, a2, a3)`: `+++, ++-, +-+, -++, +--, -+-, --+, ---`
//! * setting labels 1..8: `(x1,x2,x3')`, `(x1,x2',x3)`, `(x1',x2,x3)`,
//!   `(x1',x2',x3)`, `(x1',x2,x3')`, `(x1,x2',x3')`, `(x1,x2,x3)`,
//!   `(x1',x2',x3')`
//! * marginals m1..m6: `P(+,+)` of parties (2,3), (1,2), (1,3), then `P(+)`
//!   of parties 1, 2, 3.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::{close, frac, int, lit, max_of, min_of, to_f64, Scalar};

/// Default tolerance for normalization and nonnegativity checks.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::Alice, Party::Bob, Party::Charlie];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The remaining two parties, in index order.
    pub fn others(self) -> (Party, Party) {
        match self {
            Party::Alice => (Party::Bob, Party::Charlie),
            Party::Bob => (Party::Alice, Party::Charlie),
            Party::Charlie => (Party::Alice, Party::Bob),
        }
    }

    /// 1-based party number.
    pub fn number(self) -> usize {
        self.index() + 1
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// One binary setting choice per party; `true` is the primed setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementContext {
    primed: [bool; 3],
}

impl MeasurementContext {
    pub fn new(x1: u8, x2: u8, x3: u8) -> Option<Self> {
        if x1 > 1 || x2 > 1 || x3 > 1 {
            return None;
        }
        Some(Self {
            primed: [x1 == 1, x2 == 1, x3 == 1],
        })
    }

    pub fn setting(self, party: Party) -> u8 {
        u8::from(self.primed[party.index()])
    }

    pub fn settings(self) -> [u8; 3] {
        self.primed.map(u8::from)
    }

    pub fn label(self) -> SettingLabel {
        let x = self.settings();
        let pos = LABEL_CONTEXTS
            .iter()
            .position(|c| *c == x)
            .expect("all 8 contexts are labelled");
        SettingLabel(pos as u8 + 1)
    }
}

const LABEL_CONTEXTS: [[u8; 3]; 8] = [
    [0, 0, 1],
    [0, 1, 0],
    [1, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [0, 0, 0],
    [1, 1, 1],
];

/// Setting label 1..=8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SettingLabel(u8);

impl SettingLabel {
    pub const ALL: [SettingLabel; 8] = [
        SettingLabel(1),
        SettingLabel(2),
        SettingLabel(3),
        SettingLabel(4),
        SettingLabel(5),
        SettingLabel(6),
        SettingLabel(7),
        SettingLabel(8),
    ];

    pub fn new(index: u8) -> Option<Self> {
        (1..=8).contains(&index).then_some(Self(index))
    }

    /// 1-based label.
    pub fn index(self) -> u8 {
        self.0
    }

    /// 0-based row, for tables indexed by label.
    pub fn row(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn from_row(row: usize) -> Self {
        Self::ALL[row]
    }

    pub fn context(self) -> MeasurementContext {
        let [x1, x2, x3] = LABEL_CONTEXTS[self.row()];
        MeasurementContext::new(x1, x2, x3).expect("binary")
    }

    /// Coefficient of this setting's correlator in the Svetlichny sum.
    pub fn svetlichny_sign(self) -> i64 {
        if self.0 <= 6 {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<u8> for SettingLabel {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        SettingLabel::new(value).ok_or_else(|| format!("setting label {value} not in 1..=8"))
    }
}

impl From<SettingLabel> for u8 {
    fn from(value: SettingLabel) -> Self {
        value.0
    }
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome signs in the fixed ordering.
pub const OUTCOME_SIGNS: [[i8; 3]; 8] = [
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [-1, 1, 1],
    [1, -1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
    [-1, -1, -1],
];

pub fn outcome_index(signs: [i8; 3]) -> Option<usize> {
    OUTCOME_SIGNS.iter().position(|s| *s == signs)
}

/// The six marginals of the `(c, m)` parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Marginal {
    /// `P(+,+)` of parties 2 and 3 (m1).
    PairBobCharlie,
    /// `P(+,+)` of parties 1 and 2 (m2).
    PairAliceBob,
    /// `P(+,+)` of parties 1 and 3 (m3).
    PairAliceCharlie,
    /// `P(+)` of party 1 (m4).
    Alice,
    /// `P(+)` of party 2 (m5).
    Bob,
    /// `P(+)` of party 3 (m6).
    Charlie,
}

impl Marginal {
    pub const ALL: [Marginal; 6] = [
        Marginal::PairBobCharlie,
        Marginal::PairAliceBob,
        Marginal::PairAliceCharlie,
        Marginal::Alice,
        Marginal::Bob,
        Marginal::Charlie,
    ];

    /// 0-based slot (m1 is slot 0).
    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn parties(self) -> &'static [Party] {
        match self {
            Marginal::PairBobCharlie => &[Party::Bob, Party::Charlie],
            Marginal::PairAliceBob => &[Party::Alice, Party::Bob],
            Marginal::PairAliceCharlie => &[Party::Alice, Party::Charlie],
            Marginal::Alice => &[Party::Alice],
            Marginal::Bob => &[Party::Bob],
            Marginal::Charlie => &[Party::Charlie],
        }
    }

    pub fn is_pair(self) -> bool {
        self.parties().len() == 2
    }
}

/// Joint distribution over the 8 outcomes of one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<T> {
    p: [T; 8],
}

impl<T: Scalar> OutcomeDistribution<T> {
    /// Wraps raw probabilities without checking them; see [`Self::check`].
    pub fn new(p: [T; 8]) -> Self {
        Self { p }
    }

    pub fn uniform() -> Self {
        Self::new(std::array::from_fn(|_| T::one() / int(8)))
    }

    pub fn point_mass(outcome: usize) -> Self {
        Self::new(std::array::from_fn(|i| {
            if i == outcome {
                T::one()
            } else {
                T::zero()
            }
        }))
    }

    pub fn probabilities(&self) -> &[T; 8] {
        &self.p
    }

    pub fn get(&self, outcome: usize) -> &T {
        &self.p[outcome]
    }

    /// Returns the first offending outcome (negative entry) or the sum when
    /// it is off by more than `tol`.
    pub fn check(&self, tol: &T) -> Result<(), DistributionIssue> {
        for (i, v) in self.p.iter().enumerate() {
            if *v < -tol.clone() {
                return Err(DistributionIssue::Negative {
                    outcome: i,
                    value: to_f64(v),
                });
            }
        }
        let sum = self.sum();
        if !close(&sum, &T::one(), tol) {
            return Err(DistributionIssue::Sum(to_f64(&sum)));
        }
        Ok(())
    }

    pub fn sum(&self) -> T {
        self.p.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    fn mass_where(&self, pred: impl Fn(&[i8; 3]) -> bool) -> T {
        self.p
            .iter()
            .zip(OUTCOME_SIGNS.iter())
            .filter(|(_, s)| pred(s))
            .fold(T::zero(), |acc, (v, _)| acc + v.clone())
    }

    /// `[P(+), P(-)]` for one party.
    pub fn single(&self, party: Party) -> [T; 2] {
        let k = party.index();
        [
            self.mass_where(|s| s[k] == 1),
            self.mass_where(|s| s[k] == -1),
        ]
    }

    /// `[P(+,+), P(+,-), P(-,+), P(-,-)]` for the ordered pair `(a, b)`.
    pub fn pair(&self, a: Party, b: Party) -> [T; 4] {
        let (i, j) = (a.index(), b.index());
        [(1, 1), (1, -1), (-1, 1), (-1, -1)].map(|(x, y)| self.mass_where(|s| s[i] == x && s[j] == y))
    }

    /// `P(+)` or `P(+,+)` for one of the six parametrization marginals.
    pub fn marginal(&self, which: Marginal) -> T {
        let parties = which.parties();
        self.mass_where(|s| parties.iter().all(|p| s[p.index()] == 1))
    }

    /// `sum_a a1 a2 a3 p(a)`.
    pub fn correlator(&self) -> T {
        self.p
            .iter()
            .zip(OUTCOME_SIGNS.iter())
            .fold(T::zero(), |acc, (v, s)| {
                let sign = i64::from(s[0] * s[1] * s[2]);
                acc + v.clone() * int(sign)
            })
    }

    pub fn profile(&self) -> JointProfile<T> {
        JointProfile {
            c: self.p[0].clone(),
            m: Marginal::ALL.map(|w| self.marginal(w)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionIssue {
    Negative { outcome: usize, value: f64 },
    Sum(f64),
}

/// `c = P(+,+,+)` together with the six marginals m1..m6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointProfile<T> {
    pub c: T,
    pub m: [T; 6],
}

impl<T: Scalar> JointProfile<T> {
    pub fn new(c: T, m: [T; 6]) -> Self {
        Self { c, m }
    }

    /// Inclusion–exclusion reconstruction of the 8 outcome probabilities,
    /// without a sign check.
    pub fn joint_entries(&self) -> [T; 8] {
        let [m1, m2, m3, m4, m5, m6] = self.m.clone();
        let c = self.c.clone();
        [
            c.clone(),
            m2.clone() - c.clone(),
            m3.clone() - c.clone(),
            m1.clone() - c.clone(),
            m4.clone() - m2.clone() - m3.clone() + c.clone(),
            m5.clone() - m1.clone() - m2.clone() + c.clone(),
            m6.clone() - m1.clone() - m3.clone() + c.clone(),
            T::one() - m4 - m5 - m6 + m1 + m2 + m3 - c,
        ]
    }

    /// `8c - 1 + 2(m4 + m5 + m6) - 4(m1 + m2 + m3)`.
    pub fn correlator(&self) -> T {
        correlator_from_marginals(&self.c, &self.m)
    }
}

pub(crate) fn correlator_from_marginals<T: Scalar>(c: &T, m: &[T; 6]) -> T {
    let pairs = m[0].clone() + m[1].clone() + m[2].clone();
    let singles = m[3].clone() + m[4].clone() + m[5].clone();
    int::<T>(8) * c.clone() - T::one() + int::<T>(2) * singles - int::<T>(4) * pairs
}

/// Returns the joint distribution with the given `(c, m)`.
///
/// Fails with [`ModelError::InfeasibleProfile`] when an entry is below
/// `-1e-12`.
pub fn reconstruct_joint<T: Scalar>(profile: &JointProfile<T>) -> Result<OutcomeDistribution<T>, ModelError> {
    let tol: T = lit(PROBABILITY_TOLERANCE);
    let entries = profile.joint_entries();
    if let Some((outcome, v)) = entries.iter().enumerate().find(|(_, v)| **v < -tol.clone()) {
        return Err(ModelError::InfeasibleProfile {
            outcome,
            value: to_f64(v),
        });
    }
    Ok(OutcomeDistribution::new(entries))
}

/// Interval `[c_lo, c_hi]` of `c` values for which `(c, m)` reconstructs to
/// a nonnegative distribution. Ends crossed by less than `1e-12` collapse
/// to their midpoint.
pub fn c_range<T: Scalar>(m: &[T; 6]) -> Result<(T, T), ModelError> {
    let (lo, hi) = c_bounds(m);
    if lo > hi && lo.clone() - hi.clone() <= lit(PROBABILITY_TOLERANCE) {
        let mid = (lo + hi) * frac::<T>(1, 2);
        return Ok((mid.clone(), mid));
    }
    if lo > hi {
        return Err(ModelError::EmptyRange {
            lower: to_f64(&lo),
            upper: to_f64(&hi),
        });
    }
    Ok((lo, hi))
}

/// The two ends of the c range, possibly crossed.
pub(crate) fn c_bounds<T: Scalar>(m: &[T; 6]) -> (T, T) {
    let [m1, m2, m3, m4, m5, m6] = m.clone();
    let lo = max_of([
        T::zero(),
        m2.clone() + m3.clone() - m4.clone(),
        m1.clone() + m2.clone() - m5.clone(),
        m1.clone() + m3.clone() - m6.clone(),
    ])
    .expect("nonempty");
    let hi = min_of([
        m1.clone(),
        m2.clone(),
        m3.clone(),
        T::one() - m4 - m5 - m6 + m1 + m2 + m3,
    ])
    .expect("nonempty");
    (lo, hi)
}

/// One hidden-variable value: its weight and the distribution at every
/// setting, indexed by label row.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenState<T> {
    pub weight: T,
    pub tables: [OutcomeDistribution<T>; 8],
}

impl<T: Scalar> HiddenState<T> {
    pub fn new(weight: T, tables: [OutcomeDistribution<T>; 8]) -> Self {
        Self { weight, tables }
    }

    pub fn from_fn(weight: T, f: impl FnMut(SettingLabel) -> OutcomeDistribution<T>) -> Self {
        let mut f = f;
        Self::new(weight, std::array::from_fn(|row| f(SettingLabel::from_row(row))))
    }

    pub fn table(&self, label: SettingLabel) -> &OutcomeDistribution<T> {
        &self.tables[label.row()]
    }
}

/// Finite hidden-variable model.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior<T> {
    pub states: Vec<HiddenState<T>>,
}

impl<T: Scalar> Behavior<T> {
    pub fn new(states: Vec<HiddenState<T>>) -> Self {
        Self { states }
    }

    /// Single hidden state of weight 1.
    pub fn deterministic_lambda(f: impl FnMut(SettingLabel) -> OutcomeDistribution<T>) -> Self {
        Self::new(vec![HiddenState::from_fn(T::one(), f)])
    }

    pub fn uniform() -> Self {
        Self::deterministic_lambda(|_| OutcomeDistribution::uniform())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, lambda: usize) -> Result<&HiddenState<T>, ModelError> {
        self.states.get(lambda).ok_or(ModelError::IndexOutOfRange {
            index: lambda,
            len: self.states.len(),
        })
    }

    /// Distribution at `(lambda, setting)`.
    pub fn table(&self, lambda: usize, label: SettingLabel) -> Result<&OutcomeDistribution<T>, ModelError> {
        Ok(self.state(lambda)?.table(label))
    }

    /// Distributions indexed by label, averaged over the hidden variable.
    pub fn averaged_tables(&self) -> [OutcomeDistribution<T>; 8] {
        std::array::from_fn(|row| {
            let p = std::array::from_fn(|o| {
                self.states
                    .iter()
                    .fold(T::zero(), |acc, s| acc + s.weight.clone() * s.tables[row].get(o).clone())
            });
            OutcomeDistribution::new(p)
        })
    }
}

pub fn validate_behavior<T: Scalar>(b: &Behavior<T>) -> Result<(), ModelError> {
    validate_behavior_with(b, &lit(PROBABILITY_TOLERANCE))
}

/// Like [`validate_behavior`] with an explicit tolerance (used for files
/// holding values rounded to a few digits).
pub fn validate_behavior_with<T: Scalar>(b: &Behavior<T>, tol: &T) -> Result<(), ModelError> {
    if b.states.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut total = T::zero();
    for (lambda, state) in b.states.iter().enumerate() {
        if state.weight < -tol.clone() {
            return Err(ModelError::NegativeWeight {
                lambda,
                value: to_f64(&state.weight),
            });
        }
        total = total + state.weight.clone();
        for label in SettingLabel::ALL {
            state.table(label).check(tol).map_err(|issue| match issue {
                DistributionIssue::Negative { outcome, value } => ModelError::NegativeProbability {
                    lambda,
                    setting: label.index(),
                    outcome,
                    value,
                },
                DistributionIssue::Sum(sum) => ModelError::NotNormalized {
                    lambda,
                    setting: label.index(),
                    sum,
                },
            })?;
        }
    }
    if !close(&total, &T::one(), tol) {
        return Err(ModelError::WeightsNotNormalized { sum: to_f64(&total) });
    }
    Ok(())
}

pub fn profile_of<T: Scalar>(b: &Behavior<T>, lambda: usize, label: SettingLabel) -> Result<JointProfile<T>, ModelError> {
    Ok(b.table(lambda, label)?.profile())
}

/// `<X1 X2 X3>` at one context, averaged over the hidden variable.
///
/// Each per-state value is computed from the joint distribution and checked
/// against the `(c, m)` formula.
pub fn correlator<T: Scalar>(b: &Behavior<T>, ctx: MeasurementContext) -> Result<T, ModelError> {
    validate_behavior(b)?;
    correlator_unchecked(b, ctx.label())
}

pub(crate) fn correlator_unchecked<T: Scalar>(b: &Behavior<T>, label: SettingLabel) -> Result<T, ModelError> {
    let tol: T = lit(PROBABILITY_TOLERANCE);
    let mut acc = T::zero();
    for state in &b.states {
        let table = state.table(label);
        let direct = table.correlator();
        let via_profile = table.profile().correlator();
        if !close(&direct, &via_profile, &tol) {
            return Err(ModelError::CrossCheck {
                from_distribution: to_f64(&direct),
                from_profile: to_f64(&via_profile),
            });
        }
        acc = acc + state.weight.clone() * direct;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, Rational};

    fn m(v: [f64; 6]) -> [f64; 6] {
        v
    }

    #[test]
    fn labels_and_contexts_are_bijective() {
        for label in SettingLabel::ALL {
            assert_eq!(label.context().label(), label);
        }
        assert_eq!(MeasurementContext::new(0, 0, 0).unwrap().label().index(), 7);
        assert_eq!(MeasurementContext::new(1, 1, 1).unwrap().label().index(), 8);
        assert_eq!(MeasurementContext::new(1, 0, 1).unwrap().label().index(), 5);
        assert!(MeasurementContext::new(2, 0, 0).is_none());
        assert!(SettingLabel::new(0).is_none() && SettingLabel::new(9).is_none());
    }

    #[test]
    fn uniform_behavior_validates() {
        validate_behavior(&Behavior::<f64>::uniform()).unwrap();
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        let mut p = [0.0; 8];
        p[0] = 1.1;
        let b = Behavior::deterministic_lambda(|_| OutcomeDistribution::new(p));
        assert!(matches!(
            validate_behavior(&b),
            Err(ModelError::NotNormalized { lambda: 0, setting: 1, .. })
        ));
        p[1] = -0.1;
        let b = Behavior::deterministic_lambda(|_| OutcomeDistribution::new(p));
        assert!(matches!(
            validate_behavior(&b),
            Err(ModelError::NegativeProbability { outcome: 1, .. })
        ));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let s = HiddenState::from_fn(0.6, |_| OutcomeDistribution::uniform());
        let b = Behavior::new(vec![s.clone(), s]);
        assert!(matches!(validate_behavior(&b), Err(ModelError::WeightsNotNormalized { .. })));
        assert_eq!(validate_behavior(&Behavior::<f64>::new(vec![])), Err(ModelError::Empty));
    }

    #[test]
    fn uniform_profile() {
        let p = profile_of(&Behavior::<Rational>::uniform(), 0, SettingLabel::ALL[2]).unwrap();
        assert_eq!(p.c, frac(1, 8));
        assert_eq!(p.m[..3], [frac(1, 4), frac(1, 4), frac(1, 4)]);
        assert_eq!(p.m[3..], [frac(1, 2), frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn point_mass_profile() {
        let p = OutcomeDistribution::<f64>::point_mass(0).profile();
        assert_eq!(p.c, 1.0);
        assert_eq!(p.m, [1.0; 6]);
    }

    #[test]
    fn profile_of_rejects_bad_lambda() {
        let err = profile_of(&Behavior::<f64>::uniform(), 3, SettingLabel::ALL[0]).unwrap_err();
        assert_eq!(err, ModelError::IndexOutOfRange { index: 3, len: 1 });
    }

    #[test]
    fn reconstruct_uniform() {
        let d = reconstruct_joint(&JointProfile::new(0.125, m([0.25, 0.25, 0.25, 0.5, 0.5, 0.5]))).unwrap();
        assert_eq!(d, OutcomeDistribution::uniform());
    }

    #[test]
    fn reconstruct_two_point_profile() {
        for i in [0.0, 0.1, 0.37, 1.0] {
            let d = reconstruct_joint(&JointProfile::new(0.0, m([0.0, 0.0, 0.0, i, 0.0, 1.0 - i]))).unwrap();
            let mut expected = [0.0; 8];
            expected[4] = i;
            expected[6] = 1.0 - i;
            assert_eq!(d.probabilities(), &expected);
        }
    }

    #[test]
    fn reconstruct_detects_negative_entry() {
        // c = 0 is the low end of this family's c range: odd-parity uniform.
        let d = reconstruct_joint(&JointProfile::new(0.0, m([0.25, 0.25, 0.25, 0.5, 0.5, 0.5]))).unwrap();
        assert_eq!(d.probabilities(), &[0.0, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.25]);
        // Past the high end (1/4), P(+,+,-) = m2 - c goes negative first.
        let err = reconstruct_joint(&JointProfile::new(0.375, m([0.25, 0.25, 0.25, 0.5, 0.5, 0.5]))).unwrap_err();
        assert_eq!(err, ModelError::InfeasibleProfile { outcome: 1, value: -0.125 });
    }

    #[test]
    fn c_range_examples() {
        let q: Rational = frac(1, 4);
        let h: Rational = frac(1, 2);
        let r = c_range(&[q.clone(), q.clone(), q.clone(), h.clone(), h.clone(), h]).unwrap();
        assert_eq!(r, (frac(0, 1), q));
        assert_eq!(c_range(&[0.0; 6]).unwrap(), (0.0, 0.0));
        assert!(matches!(
            c_range(&[0.0, 0.0, 0.0, 0.9, 0.9, 0.9]),
            Err(ModelError::EmptyRange { .. })
        ));
    }

    #[test]
    fn correlator_examples() {
        let ctx = MeasurementContext::new(0, 1, 0).unwrap();
        assert_eq!(correlator(&Behavior::<f64>::uniform(), ctx).unwrap(), 0.0);
        let plus = Behavior::deterministic_lambda(|_| OutcomeDistribution::<f64>::point_mass(0));
        assert_eq!(correlator(&plus, ctx).unwrap(), 1.0);
    }

    #[test]
    fn correlator_averages_over_lambda() {
        let a = HiddenState::from_fn(0.25, |_| OutcomeDistribution::<f64>::point_mass(0));
        let b = HiddenState::from_fn(0.75, |_| OutcomeDistribution::point_mass(7));
        let beh = Behavior::new(vec![a, b]);
        let v = correlator(&beh, MeasurementContext::new(0, 0, 0).unwrap()).unwrap();
        assert!((v - (0.25 - 0.75)).abs() < 1e-15);
    }

    #[test]
    fn pair_and_single_marginals() {
        let d = OutcomeDistribution::<f64>::new([0.1, 0.2, 0.05, 0.15, 0.1, 0.1, 0.2, 0.1]);
        let [plus, minus] = d.single(Party::Alice);
        assert!((plus - 0.45).abs() < 1e-15 && (minus - 0.55).abs() < 1e-15);
        let pair = d.pair(Party::Bob, Party::Charlie);
        assert!((pair.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((pair[0] - d.marginal(Marginal::PairBobCharlie)).abs() < 1e-15);
    }
}
