//! Lattice-restricted search: every entry takes a value on a grid of fixed
//! spacing inside `[0, I] ∪ [1 - I, 1]`, subinterval ends included.

use crate::oracle::search::{coupled_minimum, Problem, SearchError, SearchStats};
use crate::svetlichny::{j_functional, AssignmentMatrix};

/// Points of spacing `step` in `[lo, hi]` counted from either end.
fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n)
        .flat_map(|k| [lo + k as f64 * step, hi - k as f64 * step])
        .filter(|x| *x >= lo - 1e-12 && *x <= hi + 1e-12)
        .map(|x| x.clamp(lo, hi))
        .collect();
    v.push(hi);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

type Ranges = [[(usize, usize); 6]; 8];

struct Lattice {
    values: Vec<f64>,
    slack: f64,
}

impl Lattice {
    fn boxes(&self, ranges: &Ranges) -> [[(f64, f64); 6]; 8] {
        std::array::from_fn(|r| std::array::from_fn(|j| (self.values[ranges[r][j].0], self.values[ranges[r][j].1])))
    }

    /// Entry whose relaxed value is farthest from the lattice, with the
    /// index of the lattice value just below it; `None` when the relaxed
    /// optimum is itself a lattice point.
    fn split(&self, ranges: &Ranges, relaxed: &AssignmentMatrix<f64>) -> Option<(usize, usize, usize)> {
        let mut choice: Option<(f64, usize, usize, usize)> = None;
        for r in 0..8 {
            for j in 0..6 {
                let (lo, hi) = ranges[r][j];
                if lo == hi {
                    continue;
                }
                let x = relaxed.m[r][j];
                let k = lo + self.values[lo..=hi].partition_point(|v| *v <= x + ON_LATTICE).saturating_sub(1);
                let below = x - self.values[k];
                if below <= ON_LATTICE || k == hi {
                    continue;
                }
                let above = self.values[k + 1] - x;
                if above <= ON_LATTICE {
                    continue;
                }
                let distance = below.min(above);
                if choice.is_none_or(|c| distance > c.0 + ON_LATTICE) {
                    choice = Some((distance, r, j, k));
                }
            }
        }
        choice.map(|(_, r, j, k)| (r, j, k))
    }

    /// Moves relaxed values that sit on the lattice up to rounding onto it.
    fn settle(&self, ranges: &Ranges, relaxed: &AssignmentMatrix<f64>) -> AssignmentMatrix<f64> {
        AssignmentMatrix::from_fn(|r, j| {
            let (lo, hi) = ranges[r][j];
            let x = relaxed.m[r][j];
            *self.values[lo..=hi]
                .iter()
                .min_by(|a, b| (*a - x).abs().total_cmp(&(*b - x).abs()))
                .expect("nonempty range")
        })
    }
}

/// Relaxed values this close to a lattice point count as on it.
const ON_LATTICE: f64 = 1e-9;

/// Improvement a subproblem must promise to be explored.
const PRUNE_SLACK: f64 = 1e-9;

/// Depth-first lattice branch-and-bound over linear relaxations.
pub(crate) fn grid_search(
    problem: &Problem,
    step: f64,
    node_limit: u64,
) -> Result<(f64, AssignmentMatrix<f64>, SearchStats), SearchError> {
    let (outcome, stats) = lattice_search(problem, step, node_limit);
    match outcome {
        Outcome::Done(Some((v, m))) => Ok((v, m, stats)),
        Outcome::Done(None) => Err(SearchError::Empty),
        Outcome::Stopped(_) => Err(SearchError::Budget),
    }
}

/// Best lattice point found within `node_limit` nodes, if any.
pub(crate) fn lattice_incumbent(problem: &Problem, step: f64, node_limit: u64) -> Option<(f64, AssignmentMatrix<f64>)> {
    match lattice_search(problem, step, node_limit).0 {
        Outcome::Done(found) | Outcome::Stopped(found) => found,
    }
}

enum Outcome {
    Done(Option<(f64, AssignmentMatrix<f64>)>),
    Stopped(Option<(f64, AssignmentMatrix<f64>)>),
}

fn lattice_search(problem: &Problem, step: f64, node_limit: u64) -> (Outcome, SearchStats) {
    let mut values = lattice(0.0, problem.i, step);
    values.extend(lattice(1.0 - problem.i, 1.0, step));
    let lat = Lattice {
        values,
        slack: PRUNE_SLACK,
    };
    let last = lat.values.len() - 1;
    let mut stack: Vec<Ranges> = vec![[[(0, last); 6]; 8]];
    let mut best = f64::INFINITY;
    let mut found: Option<AssignmentMatrix<f64>> = None;
    let (mut nodes, mut solves) = (0u64, 0u64);
    while let Some(ranges) = stack.pop() {
        if nodes >= node_limit {
            let found = found.map(|m| (best, m));
            return (Outcome::Stopped(found), SearchStats { nodes, leaves: solves });
        }
        nodes += 1;
        solves += 1;
        let Some((bound, relaxed)) = coupled_minimum(problem, &lat.boxes(&ranges)) else {
            continue;
        };
        if bound >= best - lat.slack {
            continue;
        }
        let Some((r, j, k)) = lat.split(&ranges, &relaxed) else {
            let point = lat.settle(&ranges, &relaxed);
            let v = j_functional(&point);
            if v < best {
                best = v;
                found = Some(point);
            }
            if best <= PRUNE_SLACK {
                break;
            }
            continue;
        };
        let (lo, hi) = ranges[r][j];
        let mut left = ranges;
        left[r][j] = (lo, k);
        let mut right = ranges;
        right[r][j] = (k + 1, hi);
        let x = relaxed.m[r][j];
        if x - lat.values[k] <= lat.values[k + 1] - x {
            stack.push(right);
            stack.push(left);
        } else {
            stack.push(left);
            stack.push(right);
        }
    }
    let found = found.map(|m| (best, m));
    (Outcome::Done(found), SearchStats { nodes, leaves: solves })
}
