use std::f64::consts::PI;

use proptest::prelude::*;

use svrelax::bounds::{
    channel_capacity, closed_form_j, ghz_violation, minimal_relaxation, mutual_info_shift, relaxed_bound,
    simultaneous_pieces, RelaxationBudget, Scenario,
};
use svrelax::metrics::{complementarity_check, indeterminism_degrees, signaling_degrees};
use svrelax::model::{
    c_range, outcome_index, reconstruct_joint, validate_behavior, Behavior, HiddenState, JointProfile, OutcomeDistribution,
    OUTCOME_SIGNS,
};
use svrelax::quantum::{ghz_behavior, ghz_correlator, EquatorialAngles};
use svrelax::svetlichny::{correlator_bounds, e_lambda, j_functional, svetlichny_value, AssignmentMatrix};
use svrelax::{Assignment64, Behavior64, Distribution64};

fn distribution() -> impl Strategy<Value = Distribution64> {
    (prop::array::uniform8(0.0f64..1.0), prop::array::uniform8(any::<bool>()), 0usize..8).prop_map(
        |(raw, keep, spike)| {
            let mut p = raw.map(|x| -(1.0 - x).ln());
            if keep.iter().filter(|k| **k).count() < 4 {
                for (v, k) in p.iter_mut().zip(keep) {
                    if !k {
                        *v = 0.0;
                    }
                }
            }
            p[spike] += 0.1;
            let total: f64 = p.iter().sum();
            OutcomeDistribution::new(p.map(|v| v / total))
        },
    )
}

fn behavior() -> impl Strategy<Value = Behavior64> {
    prop::collection::vec((0.05f64..1.0, prop::collection::vec(distribution(), 8)), 1..4).prop_map(|states| {
        let total: f64 = states.iter().map(|s| s.0).sum();
        Behavior::new(
            states
                .into_iter()
                .map(|(w, tables)| HiddenState::from_fn(w / total, |l| tables[l.row()].clone()))
                .collect(),
        )
    })
}

fn sign(outcome: usize, party: usize) -> f64 {
    OUTCOME_SIGNS[outcome][party] as f64
}

fn flip_party(outcome: usize, party: usize) -> usize {
    let mut signs = OUTCOME_SIGNS[outcome];
    signs[party] = -signs[party];
    outcome_index(signs).unwrap()
}

fn feasible_row() -> impl Strategy<Value = ([f64; 6], f64)> {
    (distribution(), 0.0f64..=1.0).prop_map(|(d, t)| {
        let prof = d.profile();
        let (lo, hi) = c_range(&prof.m).expect("marginals of a distribution");
        (prof.m, lo + t * (hi - lo))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn joint_roundtrip(d in distribution()) {
        let back = reconstruct_joint(&d.profile()).unwrap();
        for k in 0..8 {
            prop_assert!((back.get(k) - d.get(k)).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlator_formula(d in distribution()) {
        let prof = d.profile();
        let direct: f64 = (0..8).map(|k| sign(k, 0) * sign(k, 1) * sign(k, 2) * d.get(k)).sum();
        let m = prof.m;
        let formula = 8.0 * prof.c - 1.0 + 2.0 * (m[3] + m[4] + m[5]) - 4.0 * (m[0] + m[1] + m[2]);
        prop_assert!((direct - formula).abs() <= 1e-12);
        prop_assert!((prof.correlator() - direct).abs() <= 1e-12);
    }

    #[test]
    fn c_range_is_the_feasible_set(d in distribution()) {
        let m = d.profile().m;
        let (lo, hi) = c_range(&m).unwrap();
        prop_assert!(reconstruct_joint(&JointProfile::new(lo, m)).is_ok());
        prop_assert!(reconstruct_joint(&JointProfile::new(hi, m)).is_ok());
        prop_assert!(reconstruct_joint(&JointProfile::new(lo - 1e-6, m)).is_err());
        prop_assert!(reconstruct_joint(&JointProfile::new(hi + 1e-6, m)).is_err());
    }

    #[test]
    fn e_lambda_respects_j(rows in prop::collection::vec(feasible_row(), 8)) {
        let a: Assignment64 = AssignmentMatrix::from_fn(|r, j| rows[r].0[j]);
        let c: [f64; 8] = std::array::from_fn(|r| rows[r].1);
        let e = e_lambda(&a, &c).unwrap();
        prop_assert!(e <= 8.0 - 2.0 * j_functional(&a) + 1e-9, "{e} vs J {}", j_functional(&a));
    }

    #[test]
    fn correlator_slope_is_eight(d in distribution()) {
        let m = d.profile().m;
        let (lo, hi) = c_range(&m).unwrap();
        let (e_lo, e_hi) = correlator_bounds(&m).unwrap();
        prop_assert!(((e_hi - e_lo) - 8.0 * (hi - lo)).abs() <= 1e-9);
    }

    #[test]
    fn degrees_stay_in_range(b in behavior()) {
        prop_assert!(validate_behavior(&b).is_ok());
        let v = svetlichny_value(&b).unwrap();
        prop_assert!((-8.0 - 1e-9..=8.0 + 1e-9).contains(&v));
        let s = signaling_degrees(&b).unwrap();
        let all_s: Vec<f64> = s.one_to_pair.iter().chain(&s.pair_to_one).copied().collect();
        prop_assert!(all_s.iter().all(|x| (0.0..=1.0 + 1e-12).contains(x)));
        prop_assert!((s.overall - all_s.iter().cloned().fold(0.0, f64::max)).abs() <= 1e-15);
        let i = indeterminism_degrees(&b).unwrap();
        let all_i: Vec<f64> = i.pair.iter().chain(&i.single).copied().collect();
        prop_assert!(all_i.iter().all(|x| (0.0..=0.5).contains(x)));
        prop_assert!((i.overall - all_i.iter().cloned().fold(0.0, f64::max)).abs() <= 1e-15);
    }

    #[test]
    fn degrees_ignore_hidden_variable_order(b in behavior()) {
        let mut reversed = b.clone();
        reversed.states.reverse();
        prop_assert_eq!(signaling_degrees(&b).unwrap().overall, signaling_degrees(&reversed).unwrap().overall);
        prop_assert_eq!(indeterminism_degrees(&b).unwrap(), indeterminism_degrees(&reversed).unwrap());
    }

    #[test]
    fn degrees_ignore_consistent_sign_flips(b in behavior(), party in 0usize..3) {
        let mut flipped = b.clone();
        for state in &mut flipped.states {
            for t in &mut state.tables {
                let p = *t.probabilities();
                *t = OutcomeDistribution::new(std::array::from_fn(|k| p[flip_party(k, party)]));
            }
        }
        let (s0, s1) = (signaling_degrees(&b).unwrap(), signaling_degrees(&flipped).unwrap());
        prop_assert!((s0.overall - s1.overall).abs() <= 1e-12);
        let (i0, i1) = (indeterminism_degrees(&b).unwrap(), indeterminism_degrees(&flipped).unwrap());
        prop_assert!((i0.overall - i1.overall).abs() <= 1e-12);
    }

    #[test]
    fn mixing_never_raises_degrees(a in behavior(), b in behavior(), w in 0.05f64..0.95) {
        let mut mixed = a.clone();
        for s in &mut mixed.states {
            s.weight *= w;
        }
        mixed.states.extend(b.states.iter().cloned().map(|mut s| {
            s.weight *= 1.0 - w;
            s
        }));
        let s = |x: &Behavior64| signaling_degrees(x).unwrap().overall;
        let i = |x: &Behavior64| indeterminism_degrees(x).unwrap().overall;
        prop_assert!(s(&mixed) <= s(&a).max(s(&b)) + 1e-12);
        prop_assert!(i(&mixed) <= i(&a).max(i(&b)) + 1e-12);
    }

    #[test]
    fn complementarity_relation(b in behavior()) {
        let c = complementarity_check(&b).unwrap();
        prop_assert!(c.holds, "I = {}, S = {}", c.indeterminism, c.signaling);
    }

    #[test]
    fn bound_is_monotone(i in 0.0f64..0.49, s in 0.0f64..1.0, di in 0.0f64..0.01, ds in 0.0f64..0.1) {
        for sc in Scenario::ALL {
            let at = |i: f64, s: f64| relaxed_bound(&RelaxationBudget::new(i, s.min(1.0), sc).unwrap());
            let base = at(i, s);
            prop_assert!((4.0..=8.0).contains(&base));
            prop_assert!(at(i + di, s) >= base - 1e-12);
            prop_assert!(at(i, s + ds) >= base - 1e-12);
            let budget = RelaxationBudget::new(i, s, sc).unwrap();
            prop_assert!((8.0 - 2.0 * closed_form_j(&budget) - base).abs() <= 1e-12);
        }
    }

    #[test]
    fn minimal_budget_absorbs_violation(v in 0.01f64..=4.0) {
        for sc in Scenario::ALL {
            for branch in minimal_relaxation(v, sc).unwrap() {
                prop_assert!((branch.s_v - (1.0 - 2.0 * branch.i_v)).abs() <= 1e-12);
                let s = (branch.s_v - 1e-9).max(0.0);
                if branch.valid && branch.i_v < 0.5 {
                    let b = relaxed_bound(&RelaxationBudget::new(branch.i_v, s, sc).unwrap());
                    prop_assert!((b - (4.0 + v)).abs() <= 1e-9, "{sc} V={v}: {b}");
                }
            }
        }
    }

    #[test]
    fn capacity_is_increasing(a in 0.0f64..1.0, d in 1e-6f64..0.5) {
        let b = (a + d).min(1.0);
        prop_assume!(b > a);
        prop_assert!(channel_capacity(b) > channel_capacity(a));
        prop_assert!((channel_capacity(a) - mutual_info_shift((1.0 - a) / 2.0, a)).abs() <= 1e-12);
    }

    #[test]
    fn ghz_correlator_depends_on_the_sum(phi in prop::array::uniform3(-PI..PI), t in prop::array::uniform2(-PI..PI)) {
        let total = phi[0] + phi[1] + phi[2];
        let moved = [t[0], t[1], total - t[0] - t[1]];
        prop_assert!((ghz_correlator(phi) - ghz_correlator(moved)).abs() <= 1e-12);
    }

    #[test]
    fn ghz_behavior_is_valid(phi in prop::array::uniform6(0.0..2.0 * PI)) {
        let angles = EquatorialAngles::new([[phi[0], phi[1]], [phi[2], phi[3]], [phi[4], phi[5]]]);
        let b = ghz_behavior(&angles);
        prop_assert!(validate_behavior(&b).is_ok());
        let v = svetlichny_value(&b).unwrap();
        prop_assert!(v.abs() <= 4.0 * 2f64.sqrt() + 1e-9);
    }
}

#[test]
fn simultaneous_pieces_meet_at_breakpoints() {
    let (a, b) = simultaneous_pieces(&(2.0f64 / 9.0));
    assert!((a - b).abs() <= 1e-12);
    let (_, b) = simultaneous_pieces(&0.25f64);
    assert!((b - 8.0).abs() <= 1e-12);
}

#[test]
fn ghz_behavior_complementarity() {
    let angles = EquatorialAngles::new([[0.0, PI / 2.0]; 3]);
    let c = complementarity_check(&ghz_behavior(&angles)).unwrap();
    assert!((c.indeterminism - 0.5).abs() <= 1e-12);
    assert!(c.signaling.abs() <= 1e-12);
    assert!(c.holds);
    assert!(ghz_violation() > 1.6);
}
