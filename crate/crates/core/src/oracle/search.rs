//! Branch-and-bound over subinterval choices for the `J` minimization.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bounds::Scenario;
use crate::model::SettingLabel;
use crate::oracle::linkage::{linkage_groups, LinkageGroup};
use crate::oracle::lp::{Cmp, Lp, LpResult};
use crate::svetlichny::AssignmentMatrix;

/// Entry address: (label row, marginal slot).
pub(crate) type Entry = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Side {
    Low,
    High,
}

/// The constraint set for one `(I, S, scenario)`.
pub(crate) struct Problem {
    pub i: f64,
    pub s: f64,
    pub groups: Vec<LinkageGroup>,
    pub permitted: Vec<bool>,
    pub below_gap: bool,
    /// Branch variables: each fixes the side of a set of entries.
    pub branches: Vec<Vec<Entry>>,
    pub branch_of: [[usize; 6]; 8],
    /// Lowest penalty of each setting for every partial side pattern in
    /// base 3 (digit 0 low, 1 high, 2 open); infinite when no realizable
    /// row exists.
    pub partial: Vec<Vec<f64>>,
}

pub(crate) fn side_box(i: f64, side: Side) -> (f64, f64) {
    match side {
        Side::Low => (0.0, i),
        Side::High => (1.0 - i, 1.0),
    }
}

/// Linear part of one setting's penalty over (m1..m6), the epigraph
/// variable's coefficient being 1, plus the constant.
fn setting_cost(row: usize) -> ([f64; 6], f64) {
    if SettingLabel::from_row(row).svetlichny_sign() > 0 {
        ([2.0, 2.0, 2.0, -1.0, -1.0, -1.0], 1.0)
    } else {
        ([-2.0, -2.0, -2.0, 1.0, 1.0, 1.0], 0.0)
    }
}

/// Adds the epigraph and realizability rows of one setting.
fn add_setting_rows(lp: &mut Lp, row: usize, m: [usize; 6], t: usize) {
    let [m1, m2, m3, m4, m5, m6] = m;
    // Terms of the c range: lower ends and upper ends as (coeffs, constant).
    let lows: [(Vec<(usize, f64)>, f64); 3] = [
        (vec![(m2, 1.0), (m3, 1.0), (m4, -1.0)], 0.0),
        (vec![(m1, 1.0), (m2, 1.0), (m5, -1.0)], 0.0),
        (vec![(m1, 1.0), (m3, 1.0), (m6, -1.0)], 0.0),
    ];
    let d = (
        vec![(m4, -1.0), (m5, -1.0), (m6, -1.0), (m1, 1.0), (m2, 1.0), (m3, 1.0)],
        1.0,
    );
    let highs: [(Vec<(usize, f64)>, f64); 4] = [(vec![(m1, 1.0)], 0.0), (vec![(m2, 1.0)], 0.0), (vec![(m3, 1.0)], 0.0), d.clone()];
    // 0 <= D.
    lp.constrain(d.0.clone(), Cmp::Ge, -d.1);
    for (lc, lk) in &lows {
        for (hc, hk) in &highs {
            // low <= high  <=>  high - low >= lk - hk
            let mut coeffs = hc.clone();
            coeffs.extend(lc.iter().map(|(j, a)| (*j, -a)));
            lp.constrain(coeffs, Cmp::Ge, lk - hk);
        }
    }
    if SettingLabel::from_row(row).svetlichny_sign() > 0 {
        // t >= -4 h for every upper end h.
        for (hc, hk) in &highs {
            let mut coeffs = vec![(t, 1.0)];
            coeffs.extend(hc.iter().map(|(j, a)| (*j, 4.0 * a)));
            lp.constrain(coeffs, Cmp::Ge, -4.0 * hk);
        }
    } else {
        // t >= 4 l for every lower end l (t >= 0 through its bound).
        for (lc, lk) in &lows {
            let mut coeffs = vec![(t, 1.0)];
            coeffs.extend(lc.iter().map(|(j, a)| (*j, -4.0 * a)));
            lp.constrain(coeffs, Cmp::Ge, 4.0 * lk);
        }
    }
}

fn epigraph_bounds(row: usize) -> (f64, f64) {
    if SettingLabel::from_row(row).svetlichny_sign() > 0 {
        (-4.0, 0.0)
    } else {
        (0.0, 8.0)
    }
}

/// Minimum of one setting's penalty over a box, with the row required to be
/// realizable.
pub(crate) fn setting_minimum(row: usize, bounds: &[(f64, f64); 6]) -> Option<(f64, [f64; 6])> {
    let (cost, constant) = setting_cost(row);
    let mut lp = Lp::new();
    let m: [usize; 6] = std::array::from_fn(|j| lp.var(bounds[j].0, bounds[j].1, cost[j]));
    let (tl, tu) = epigraph_bounds(row);
    let t = lp.var(tl, tu, 1.0);
    add_setting_rows(&mut lp, row, m, t);
    match lp.solve() {
        LpResult::Optimal { x, value } => Some((value + constant, std::array::from_fn(|j| x[j]))),
        _ => None,
    }
}

/// Minimum of the full penalty with every entry boxed and the linkage rows
/// that are not implied by the boxes.
pub(crate) fn coupled_minimum(problem: &Problem, bounds: &[[(f64, f64); 6]; 8]) -> Option<(f64, AssignmentMatrix<f64>)> {
    let mut lp = Lp::new();
    let mut vars = [[0usize; 6]; 8];
    let mut constant = 0.0;
    for row in 0..8 {
        let (cost, k) = setting_cost(row);
        constant += k;
        for j in 0..6 {
            vars[row][j] = lp.var(bounds[row][j].0, bounds[row][j].1, cost[j]);
        }
    }
    for (row, m) in vars.iter().enumerate() {
        let (tl, tu) = epigraph_bounds(row);
        let t = lp.var(tl, tu, 1.0);
        add_setting_rows(&mut lp, row, *m, t);
    }
    for (g, permitted) in problem.groups.iter().zip(&problem.permitted) {
        let slot = g.slot();
        let rows: Vec<usize> = g.members.iter().map(|l| l.row()).collect();
        for (a_idx, a) in rows.iter().enumerate() {
            for b in &rows[a_idx + 1..] {
                let (ba, bb) = (bounds[*a][slot], bounds[*b][slot]);
                let (va, vb) = (vars[*a][slot], vars[*b][slot]);
                if *permitted {
                    let widest = (ba.1 - bb.0).max(bb.1 - ba.0);
                    if widest > problem.s {
                        lp.constrain(vec![(va, 1.0), (vb, -1.0)], Cmp::Le, problem.s);
                        lp.constrain(vec![(va, 1.0), (vb, -1.0)], Cmp::Ge, -problem.s);
                    }
                } else if !(ba.0 == ba.1 && bb.0 == bb.1 && ba.0 == bb.0) {
                    lp.constrain(vec![(va, 1.0), (vb, -1.0)], Cmp::Eq, 0.0);
                }
            }
        }
    }
    match lp.solve() {
        LpResult::Optimal { x, value } => Some((
            value + constant,
            AssignmentMatrix::from_fn(|row, j| x[vars[row][j]]),
        )),
        _ => None,
    }
}

const POW3: [usize; 7] = [1, 3, 9, 27, 81, 243, 729];

impl Problem {
    pub(crate) fn new(i: f64, s: f64, scenario: Scenario) -> Problem {
        let groups = linkage_groups();
        let permitted: Vec<bool> = groups.iter().map(|g| scenario.permits(g.direction())).collect();
        let below_gap = s < 1.0 - 2.0 * i;
        let mut branches: Vec<Vec<Entry>> = Vec::new();
        // Single-party groups first: each spans four settings.
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by_key(|g| (groups[*g].marginal.is_pair(), *g));
        for g in order {
            let entries: Vec<Entry> = groups[g].members.iter().map(|l| (l.row(), groups[g].slot())).collect();
            if below_gap || !permitted[g] {
                branches.push(entries);
            } else {
                branches.extend(entries.into_iter().map(|e| vec![e]));
            }
        }
        let mut branch_of = [[0usize; 6]; 8];
        for (b, entries) in branches.iter().enumerate() {
            for (row, slot) in entries {
                branch_of[*row][*slot] = b;
            }
        }
        let mut table = [[f64::INFINITY; 64]; 8];
        for row in 0..8 {
            for pattern in 0..64usize {
                let bounds = std::array::from_fn(|j| {
                    side_box(i, if pattern >> j & 1 == 1 { Side::High } else { Side::Low })
                });
                if let Some((v, _)) = setting_minimum(row, &bounds) {
                    table[row][pattern] = v;
                }
            }
        }
        let partial = (0..8)
            .map(|row| {
                (0..729)
                    .map(|code| {
                        (0..64usize)
                            .filter(|p| (0..6).all(|j| {
                                let digit = code / POW3[j] % 3;
                                digit == 2 || digit == (p >> j & 1)
                            }))
                            .map(|p| table[row][p])
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        Problem {
            i,
            s,
            groups,
            permitted,
            below_gap,
            branches,
            branch_of,
            partial,
        }
    }

    /// Whether the fixed branches already rule out every completion.
    fn branches_conflict(&self, sides: &[Option<Side>]) -> bool {
        self.groups.iter().zip(&self.permitted).any(|(g, permitted)| {
            let slot = g.slot();
            let fixed: Vec<Side> = g
                .members
                .iter()
                .filter_map(|l| sides[self.branch_of[l.row()][slot]])
                .collect();
            let mixed = fixed.iter().any(|s| *s != fixed[0]);
            mixed && (!*permitted || self.below_gap)
        })
    }
}

/// A search node: partial side choices and the per-setting base-3 codes.
#[derive(Clone)]
struct Node {
    sides: Vec<Option<Side>>,
    codes: [usize; 8],
}

impl Node {
    fn root(problem: &Problem) -> Node {
        Node {
            sides: vec![None; problem.branches.len()],
            codes: [728; 8],
        }
    }

    fn assign(&self, problem: &Problem, branch: usize, side: Side) -> Node {
        let mut next = self.clone();
        next.sides[branch] = Some(side);
        let digit = if side == Side::High { 1 } else { 0 };
        for (row, slot) in &problem.branches[branch] {
            next.codes[*row] -= (2 - digit) * POW3[*slot];
        }
        next
    }

    fn bound(&self, problem: &Problem) -> f64 {
        (0..8).map(|row| problem.partial[row][self.codes[row]]).sum()
    }
}

pub(crate) struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
}

pub(crate) enum SearchError {
    Budget,
    Empty,
}

/// Lower bound and relaxed optimum of a node, or `None` when it is empty.
struct Examined {
    bound: f64,
    relaxed: AssignmentMatrix<f64>,
}

struct Shared<'a> {
    problem: &'a Problem,
    best: AtomicU64,
    nodes: AtomicU64,
    leaves: AtomicU64,
    limit: u64,
    aborted: AtomicBool,
    tolerance: f64,
}

/// Distance allowed between a relaxed entry and the nearest subinterval for
/// the relaxed optimum to count as a solution.
const GAP_EPS: f64 = 1e-10;

impl Shared<'_> {
    fn best(&self) -> f64 {
        f64::from_bits(self.best.load(Ordering::Relaxed))
    }

    fn offer(&self, v: f64) {
        // Nonnegative doubles order like their bit patterns.
        self.best.fetch_min(v.max(0.0).to_bits(), Ordering::Relaxed);
    }

    fn tick(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }

    fn examine(&self, node: &Node) -> Option<Examined> {
        let problem = self.problem;
        if problem.branches_conflict(&node.sides) || !node.bound(problem).is_finite() {
            return None;
        }
        let boxes = std::array::from_fn(|row| {
            std::array::from_fn(|j| match node.sides[problem.branch_of[row][j]] {
                Some(side) => side_box(problem.i, side),
                None => (0.0, 1.0),
            })
        });
        self.leaves.fetch_add(1, Ordering::Relaxed);
        let (bound, relaxed) = coupled_minimum(problem, &boxes)?;
        Some(Examined {
            bound: bound.max(node.bound(problem)),
            relaxed,
        })
    }

    /// Open branch to split next: the first one holding an entry inside the
    /// gap, or `None` when the relaxed optimum is already admissible.
    fn branching_choice(&self, node: &Node, relaxed: &AssignmentMatrix<f64>) -> Option<usize> {
        let i = self.problem.i;
        self.problem.branches.iter().enumerate().find_map(|(b, entries)| {
            let open = node.sides[b].is_none();
            let inside = entries.iter().any(|(r, j)| {
                let v = relaxed.m[*r][*j];
                v > i + GAP_EPS && v < 1.0 - i - GAP_EPS
            });
            (open && inside).then_some(b)
        })
    }

    fn children(&self, node: &Node, branch: usize) -> Vec<(Examined, Node)> {
        let mut out: Vec<(Examined, Node)> = [Side::Low, Side::High]
            .into_iter()
            .filter_map(|side| {
                let child = node.assign(self.problem, branch, side);
                self.examine(&child).map(|e| (e, child))
            })
            .collect();
        out.sort_by(|a, b| a.0.bound.total_cmp(&b.0.bound));
        out
    }

    /// Fixes every open branch on the side most of its relaxed entries lean
    /// towards and solves what remains.
    fn rounded(&self, node: &Node, relaxed: &AssignmentMatrix<f64>) -> Option<(f64, AssignmentMatrix<f64>)> {
        let problem = self.problem;
        let mut full = node.clone();
        for (b, entries) in problem.branches.iter().enumerate() {
            if full.sides[b].is_none() {
                let high = entries.iter().filter(|(r, j)| relaxed.m[*r][*j] >= 0.5).count();
                let side = if 2 * high > entries.len() { Side::High } else { Side::Low };
                full = full.assign(problem, b, side);
            }
        }
        let e = self.examine(&full)?;
        Some((e.bound, e.relaxed))
    }

    /// Best-first depth-first search below `node`, improving `best`.
    fn descend(&self, node: &Node, exam: &Examined) {
        if !self.tick() || exam.bound >= self.best() - self.tolerance {
            return;
        }
        let Some(branch) = self.branching_choice(node, &exam.relaxed) else {
            self.offer(exam.bound);
            return;
        };
        if let Some((v, _)) = self.rounded(node, &exam.relaxed) {
            self.offer(v);
        }
        for (e, child) in self.children(node, branch) {
            self.descend(&child, &e);
        }
    }

    /// First admissible solution within `tolerance` of `target`, in
    /// best-bound order with the low side winning ties.
    fn first_attaining(&self, node: &Node, exam: &Examined, target: f64) -> Option<(f64, AssignmentMatrix<f64>)> {
        if !self.tick() || exam.bound > target + self.tolerance {
            return None;
        }
        let Some(branch) = self.branching_choice(node, &exam.relaxed) else {
            return Some((exam.bound, exam.relaxed.clone()));
        };
        if let Some((v, m)) = self.rounded(node, &exam.relaxed) {
            if v <= target + self.tolerance {
                return Some((v, m));
            }
        }
        self.children(node, branch)
            .into_iter()
            .find_map(|(e, child)| self.first_attaining(&child, &e, target))
    }
}

/// Minimizes over all side assignments. Open subproblems are explored in
/// parallel; the attaining matrix is then recovered by a sequential pass in a
/// fixed order, so it does not depend on scheduling.
pub(crate) fn branch_and_bound(
    problem: &Problem,
    seed: Option<(f64, AssignmentMatrix<f64>)>,
    node_limit: u64,
    tolerance: f64,
    parallel_width: usize,
) -> Result<(f64, AssignmentMatrix<f64>, SearchStats), SearchError> {
    let shared = Shared {
        problem,
        best: AtomicU64::new(f64::INFINITY.to_bits()),
        nodes: AtomicU64::new(0),
        leaves: AtomicU64::new(0),
        limit: node_limit,
        aborted: AtomicBool::new(false),
        tolerance,
    };
    if let Some((v, _)) = &seed {
        shared.offer(*v);
    }
    let root = Node::root(problem);
    let root_exam = shared.examine(&root).ok_or(SearchError::Empty)?;
    // Expand breadth-first until there is enough work to share out.
    let mut frontier = vec![(root_exam, root)];
    let width = parallel_width.max(1);
    while width > 1 && frontier.len() < 4 * width && !frontier.is_empty() {
        let mut next = Vec::new();
        let mut expanded = false;
        for (exam, node) in frontier {
            match shared.branching_choice(&node, &exam.relaxed) {
                Some(b) if shared.tick() => {
                    expanded = true;
                    next.extend(shared.children(&node, b));
                }
                _ => next.push((exam, node)),
            }
        }
        frontier = next;
        if !expanded {
            break;
        }
    }
    frontier.sort_by(|a, b| a.0.bound.total_cmp(&b.0.bound));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .expect("thread pool");
    pool.install(|| frontier.par_iter().for_each(|(exam, node)| shared.descend(node, exam)));
    if shared.aborted.load(Ordering::Relaxed) {
        return Err(SearchError::Budget);
    }
    let best = shared.best();
    if !best.is_finite() {
        return Err(SearchError::Empty);
    }
    let found = match seed {
        Some((v, m)) if v <= best + tolerance => Some((v, m)),
        _ => {
            let root = Node::root(problem);
            let root_exam = shared.examine(&root).ok_or(SearchError::Empty)?;
            shared.first_attaining(&root, &root_exam, best)
        }
    };
    if shared.aborted.load(Ordering::Relaxed) {
        return Err(SearchError::Budget);
    }
    let (value, matrix) = found.ok_or(SearchError::Empty)?;
    Ok((
        value,
        matrix,
        SearchStats {
            nodes: shared.nodes.load(Ordering::Relaxed),
            leaves: shared.leaves.load(Ordering::Relaxed),
        },
    ))
}
