//! Three-qubit GHZ state under equatorial measurements.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Behavior, OutcomeDistribution, Party, SettingLabel, OUTCOME_SIGNS};

/// Measurement angles in the X-Y plane: `phi[party][setting]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquatorialAngles {
    pub phi: [[f64; 2]; 3],
}

impl EquatorialAngles {
    pub fn new(phi: [[f64; 2]; 3]) -> Self {
        Self { phi }.canonical()
    }

    /// Every angle reduced to `[0, 2pi)`.
    pub fn canonical(self) -> Self {
        Self {
            phi: self.phi.map(|p| p.map(|a| a.rem_euclid(TAU) % TAU)),
        }
    }

    /// The three angles measured at one setting.
    pub fn at(&self, label: SettingLabel) -> [f64; 3] {
        let ctx = label.context();
        Party::ALL.map(|p| self.phi[p.index()][ctx.setting(p) as usize])
    }
}

/// Amplitudes over `|q1 q2 q3>`, with index `4 q1 + 2 q2 + q3`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: [Complex64; 8],
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn apply(&self, qubit: usize, op: &[[Complex64; 2]; 2]) -> StateVector {
        let shift = 2 - qubit;
        let mut out = [Complex64::new(0.0, 0.0); 8];
        for (index, slot) in out.iter_mut().enumerate() {
            let bit = (index >> shift) & 1;
            let base = index & !(1 << shift);
            *slot = op[bit][0] * self.amplitudes[base] + op[bit][1] * self.amplitudes[base | (1 << shift)];
        }
        StateVector { amplitudes: out }
    }
}

/// `(|000> + |111>)/sqrt(2)`.
pub fn ghz_state() -> StateVector {
    let mut amplitudes = [Complex64::new(0.0, 0.0); 8];
    amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[7] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector { amplitudes }
}

/// `cos(phi) X + sin(phi) Y`.
fn equatorial(phi: f64) -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    [[zero, Complex64::from_polar(1.0, -phi)], [Complex64::from_polar(1.0, phi), zero]]
}

/// Projector onto outcome `sign` of the equatorial observable at `phi`.
fn projector(phi: f64, sign: i8) -> [[Complex64; 2]; 2] {
    let s = f64::from(sign) * 0.5;
    let o = equatorial(phi);
    let half = Complex64::new(0.5, 0.0);
    [[half, o[0][1] * s], [o[1][0] * s, half]]
}

fn expectation(state: &StateVector, ops: [[[Complex64; 2]; 2]; 3]) -> Complex64 {
    let mut applied = state.clone();
    for (qubit, op) in ops.iter().enumerate() {
        applied = applied.apply(qubit, op);
    }
    state.inner(&applied)
}

/// `<X1 X2 X3>` evaluated on the state vector.
pub fn ghz_correlator_statevector(phi: [f64; 3]) -> f64 {
    expectation(&ghz_state(), phi.map(equatorial)).re
}

/// `cos(phi1 + phi2 + phi3)`.
pub fn ghz_correlator(phi: [f64; 3]) -> f64 {
    (phi[0] + phi[1] + phi[2]).cos()
}

/// Outcome probabilities at one choice of angles, in the frozen outcome order.
pub fn ghz_distribution(phi: [f64; 3]) -> OutcomeDistribution<f64> {
    let state = ghz_state();
    let p = OUTCOME_SIGNS.map(|signs| {
        let ops = [0, 1, 2].map(|k| projector(phi[k], signs[k]));
        expectation(&state, ops).re
    });
    OutcomeDistribution::new(p)
}

/// Single hidden-variable behavior with the GHZ statistics at every setting.
pub fn ghz_behavior(angles: &EquatorialAngles) -> Behavior<f64> {
    Behavior::deterministic_lambda(|label| ghz_distribution(angles.at(label)))
}

/// Svetlichny combination of GHZ correlators.
pub fn ghz_svetlichny(angles: &EquatorialAngles) -> f64 {
    SettingLabel::ALL
        .iter()
        .map(|l| l.svetlichny_sign() as f64 * ghz_correlator(angles.at(*l)))
        .sum()
}

/// Angles `phi' = phi + pi/2` with the same `phi = alpha` for every party.
pub fn offset_ansatz(alpha: f64) -> EquatorialAngles {
    EquatorialAngles::new([[alpha, alpha + PI / 2.0]; 3])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Maximum {
    pub angles: EquatorialAngles,
    pub value: f64,
    pub grid_points: u64,
    pub sweeps: u32,
}

/// Grid search over the measurement angles followed by exact coordinate
/// ascent.
///
/// Shifting Alice's two angles by `d` and Bob's (or Charlie's) by `-d` leaves
/// every angle sum unchanged, so Alice's and Bob's unprimed angles are held at
/// zero on the grid and the remaining four are scanned.
pub fn maximize_svetlichny(resolution: f64, refine: bool) -> Maximum {
    assert!(resolution > 0.0 && resolution.is_finite(), "resolution must be positive");
    let n = ((TAU / resolution).round() as usize).max(1);
    let grid: Vec<f64> = (0..n).map(|k| k as f64 * TAU / n as f64).collect();
    let trig: Vec<(f64, f64)> = grid.iter().map(|a| (a.cos(), a.sin())).collect();
    // With Alice's and Bob's angles fixed the value is
    // sum over x3 of (A cos(c) - B sin(c)), one independent term per Charlie
    // setting, so the two Charlie angles are scanned separately.
    let best_c = |pair_sums: &[(f64, i64)]| -> (f64, usize) {
        let (a, b) = pair_sums
            .iter()
            .fold((0.0, 0.0), |(a, b), (p, s)| (a + *s as f64 * p.cos(), b + *s as f64 * p.sin()));
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, (c, s)) in trig.iter().enumerate() {
            let v = a * c - b * s;
            if v > best.0 {
                best = (v, k);
            }
        }
        best
    };
    let (value, angles) = (0..n)
        .into_par_iter()
        .map(|ia| {
            let a1 = grid[ia];
            let mut best = (f64::NEG_INFINITY, [0.0; 4]);
            for &b1 in &grid {
                let mut terms: [Vec<(f64, i64)>; 2] = [Vec::new(), Vec::new()];
                for label in SettingLabel::ALL {
                    let [x1, x2, x3] = label.context().settings();
                    let p = if x1 == 1 { a1 } else { 0.0 } + if x2 == 1 { b1 } else { 0.0 };
                    terms[x3 as usize].push((p, label.svetlichny_sign()));
                }
                let (v0, k0) = best_c(&terms[0]);
                let (v1, k1) = best_c(&terms[1]);
                if v0 + v1 > best.0 {
                    best = (v0 + v1, [a1, b1, grid[k0], grid[k1]]);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, [0.0; 4]),
            |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        );
    let mut best = EquatorialAngles {
        phi: [[0.0, angles[0]], [0.0, angles[1]], [angles[2], angles[3]]],
    };
    let mut best_value = value;
    let mut sweeps = 0;
    if refine {
        while sweeps < 10_000 {
            sweeps += 1;
            let before = best_value;
            for party in 0..3 {
                for setting in 0..2 {
                    best.phi[party][setting] = best_coordinate(&best, party, setting);
                }
            }
            best_value = ghz_svetlichny(&best);
            if best_value - before <= 1e-15 {
                break;
            }
        }
    }
    Maximum {
        angles: best.canonical(),
        value: ghz_svetlichny(&best),
        grid_points: (n as u64).pow(4),
        sweeps,
    }
}

/// Angle maximizing the value with every other angle fixed. The value is
/// `A cos(t) + B sin(t) + const` in the free angle `t`.
fn best_coordinate(angles: &EquatorialAngles, party: usize, setting: usize) -> f64 {
    let (mut a, mut b) = (0.0, 0.0);
    for label in SettingLabel::ALL {
        let ctx = label.context();
        if ctx.setting(Party::ALL[party]) as usize != setting {
            continue;
        }
        let phis = angles.at(label);
        let rest: f64 = phis.iter().enumerate().filter(|(k, _)| *k != party).map(|(_, p)| p).sum();
        let sign = label.svetlichny_sign() as f64;
        a += sign * rest.cos();
        b -= sign * rest.sin();
    }
    b.atan2(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{complementarity_check, indeterminism_degrees, overall_signaling};
    use crate::model::validate_behavior;
    use crate::svetlichny::svetlichny_value;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn state_basics() {
        let s = ghz_state();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.amplitudes[0].re, FRAC_1_SQRT_2);
        assert_eq!(s.amplitudes[7].re, FRAC_1_SQRT_2);
        let mut basis = [Complex64::new(0.0, 0.0); 8];
        basis[1] = Complex64::new(1.0, 0.0);
        assert_eq!(s.inner(&StateVector { amplitudes: basis }).norm(), 0.0);
    }

    #[test]
    fn correlator_examples() {
        assert!((ghz_correlator_statevector([0.0; 3]) - 1.0).abs() < 1e-12);
        assert!((ghz_correlator_statevector([PI, 0.0, 0.0]) + 1.0).abs() < 1e-12);
        let q = PI / 4.0;
        assert!((ghz_correlator_statevector([q; 3]) + FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn correlator_depends_on_sum_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let total: f64 = rng.gen_range(-10.0..10.0);
            let a: f64 = rng.gen_range(-5.0..5.0);
            let b: f64 = rng.gen_range(-5.0..5.0);
            let phi = [a, b, total - a - b];
            assert!((ghz_correlator_statevector(phi) - total.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_law_and_marginals() {
        let phi = [0.3, 1.1, -0.4];
        let d = ghz_distribution(phi);
        let e = ghz_correlator(phi);
        for (o, signs) in OUTCOME_SIGNS.iter().enumerate() {
            let parity = f64::from(signs[0] * signs[1] * signs[2]);
            assert!((d.get(o) - (1.0 + parity * e) / 8.0).abs() < 1e-12);
        }
        let angles = EquatorialAngles::new([[0.0, 0.7], [0.2, 1.9], [2.5, 4.0]]);
        let b = ghz_behavior(&angles);
        validate_behavior(&b).unwrap();
        for label in SettingLabel::ALL {
            let p = b.table(0, label).unwrap().profile();
            for (k, want) in [0.25, 0.25, 0.25, 0.5, 0.5, 0.5].iter().enumerate() {
                assert!((p.m[k] - want).abs() < 1e-12);
            }
        }
        assert!(overall_signaling(&b).unwrap() < 1e-12);
        assert!((indeterminism_degrees(&b).unwrap().overall - 0.5).abs() < 1e-12);
        assert!(complementarity_check(&b).unwrap().holds);
    }

    #[test]
    fn optimizer_reaches_maximum() {
        let best = maximize_svetlichny(PI / 24.0, true);
        assert!((best.value - 4.0 * 2f64.sqrt()).abs() < 1e-6);
        assert!(best.value <= 8.0);
        let b = ghz_behavior(&best.angles);
        assert!((svetlichny_value(&b).unwrap() - best.value).abs() < 1e-9);
    }

    #[test]
    fn offset_ansatz_value() {
        for k in 0..50 {
            let alpha = k as f64 * 0.13;
            let closed = -4.0 * (3.0 * alpha).sin() - 4.0 * (3.0 * alpha).cos();
            assert!((ghz_svetlichny(&offset_ansatz(alpha)) - closed).abs() < 1e-12);
        }
        let peak = ghz_svetlichny(&offset_ansatz(5.0 * PI / 12.0));
        assert!((peak - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_angles_stay_within_quantum_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let phi = std::array::from_fn(|_| [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)]);
            let v = ghz_svetlichny(&EquatorialAngles::new(phi));
            assert!(v.abs() <= 4.0 * 2f64.sqrt() + 1e-12);
        }
    }
}
