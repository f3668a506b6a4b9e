//! Dense two-phase primal simplex with bounded variables.
//!
//! Sizes here are a few hundred rows at most, so a full tableau is cheap.

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;
const BLAND_AFTER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    coeffs: Vec<(usize, f64)>,
    cmp: Cmp,
    rhs: f64,
}

/// `minimize cost . x` subject to linear rows and `lower <= x <= upper`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Lp {
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpResult {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    /// The pivot limit was hit; treat as a numerical failure.
    Stalled,
}

impl Lp {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        debug_assert!(lower.is_finite() && lower <= upper + EPS);
        self.lower.push(lower);
        self.upper.push(upper.max(lower));
        self.cost.push(cost);
        self.lower.len() - 1
    }

    pub(crate) fn constrain(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    pub(crate) fn solve(&self) -> LpResult {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// `m` rows of `B^-1 A` over `ncols` columns.
    t: Vec<Vec<f64>>,
    /// Values of the basic variables.
    beta: Vec<f64>,
    basis: Vec<usize>,
    /// Upper bound of every column after shifting lower bounds to 0.
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    artificial_from: usize,
    ncols: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let n = lp.lower.len();
        let m = lp.rows.len();
        let mut slack_count = 0;
        let mut art_count = 0;
        let mut oriented = Vec::with_capacity(m);
        for row in &lp.rows {
            let shift: f64 = row.coeffs.iter().map(|(j, a)| a * lp.lower[*j]).sum();
            let mut rhs = row.rhs - shift;
            let mut cmp = row.cmp;
            let mut sign = 1.0;
            if rhs < 0.0 {
                rhs = -rhs;
                sign = -1.0;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            match cmp {
                Cmp::Le => slack_count += 1,
                Cmp::Ge => {
                    slack_count += 1;
                    art_count += 1;
                }
                Cmp::Eq => art_count += 1,
            }
            oriented.push((sign, cmp, rhs));
        }
        let artificial_from = n + slack_count;
        let ncols = artificial_from + art_count;
        let mut t = vec![vec![0.0; ncols]; m];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut upper = vec![f64::INFINITY; ncols];
        for j in 0..n {
            upper[j] = lp.upper[j] - lp.lower[j];
        }
        let (mut next_slack, mut next_art) = (n, artificial_from);
        for (i, (row, (sign, cmp, rhs))) in lp.rows.iter().zip(&oriented).enumerate() {
            for (j, a) in &row.coeffs {
                t[i][*j] += sign * a;
            }
            beta[i] = *rhs;
            match cmp {
                Cmp::Le => {
                    t[i][next_slack] = 1.0;
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Cmp::Ge => {
                    t[i][next_slack] = -1.0;
                    next_slack += 1;
                    t[i][next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
                Cmp::Eq => {
                    t[i][next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let mut is_basic = vec![false; ncols];
        for b in &basis {
            is_basic[*b] = true;
        }
        Self {
            t,
            beta,
            basis,
            upper,
            at_upper: vec![false; ncols],
            is_basic,
            artificial_from,
            ncols,
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, row) in self.t.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Minimizes `cost` from the current basic feasible solution.
    fn optimize(&mut self, cost: &[f64]) -> Result<(), LpResult> {
        let mut d = self.reduced_costs(cost);
        let mut degenerate = 0;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= BLAND_AFTER;
            let mut entering = None;
            let mut best = EPS;
            for j in 0..self.ncols {
                if self.is_basic[j] || self.upper[j] <= 0.0 {
                    continue;
                }
                let score = if self.at_upper[j] { d[j] } else { -d[j] };
                if score > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = score;
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };
            let mut theta = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.t.len() {
                let alpha = dir * self.t[i][j];
                let (lim, to_upper) = if alpha > EPS {
                    (self.beta[i] / alpha, false)
                } else if alpha < -EPS && self.upper[self.basis[i]].is_finite() {
                    ((self.upper[self.basis[i]] - self.beta[i]) / -alpha, true)
                } else {
                    continue;
                };
                let lim = lim.max(0.0);
                let take = match leave {
                    None => lim < theta,
                    Some((r, _)) => {
                        lim < theta - EPS
                            || (lim <= theta + EPS
                                && if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    self.t[i][j].abs() > self.t[r][j].abs()
                                })
                    }
                };
                if take {
                    theta = theta.min(lim);
                    leave = Some((i, to_upper));
                }
            }
            if theta.is_infinite() {
                return Err(LpResult::Unbounded);
            }
            if theta <= EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            for i in 0..self.t.len() {
                self.beta[i] -= theta * dir * self.t[i][j];
            }
            match leave {
                None => {
                    self.at_upper[j] = !self.at_upper[j];
                }
                Some((r, to_upper)) => {
                    let entering_value = if self.at_upper[j] { self.upper[j] } else { 0.0 } + dir * theta;
                    let old = self.basis[r];
                    self.pivot(r, j, &mut d);
                    self.beta[r] = entering_value;
                    self.is_basic[old] = false;
                    self.at_upper[old] = to_upper;
                    self.is_basic[j] = true;
                    self.at_upper[j] = false;
                    self.basis[r] = j;
                }
            }
        }
        Err(LpResult::Stalled)
    }

    fn pivot(&mut self, r: usize, j: usize, d: &mut [f64]) {
        let p = self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                row[j] = 0.0;
            }
        }
        let f = d[j];
        if f != 0.0 {
            for (v, pr) in d.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            d[j] = 0.0;
        }
    }

    fn value_of(&self, col: usize) -> f64 {
        if self.is_basic[col] {
            let i = self.basis.iter().position(|b| *b == col).expect("basic column");
            self.beta[i]
        } else if self.at_upper[col] {
            self.upper[col]
        } else {
            0.0
        }
    }

    fn run(mut self, lp: &Lp) -> LpResult {
        if self.artificial_from < self.ncols {
            let mut phase1 = vec![0.0; self.ncols];
            for c in phase1.iter_mut().skip(self.artificial_from) {
                *c = 1.0;
            }
            if let Err(e) = self.optimize(&phase1) {
                return e;
            }
            let infeasibility: f64 = (self.artificial_from..self.ncols).map(|c| self.value_of(c)).sum();
            if infeasibility > 1e-8 {
                return LpResult::Infeasible;
            }
            for c in self.artificial_from..self.ncols {
                self.upper[c] = 0.0;
                self.at_upper[c] = false;
            }
        }
        let mut cost = vec![0.0; self.ncols];
        cost[..lp.cost.len()].copy_from_slice(&lp.cost);
        if let Err(e) = self.optimize(&cost) {
            return e;
        }
        let mut x = vec![0.0; lp.lower.len()];
        for i in 0..self.basis.len() {
            if self.basis[i] < x.len() {
                x[self.basis[i]] = self.beta[i];
            }
        }
        for (j, xj) in x.iter_mut().enumerate() {
            if !self.is_basic[j] && self.at_upper[j] {
                *xj = self.upper[j];
            }
            *xj = (*xj + lp.lower[j]).clamp(lp.lower[j], lp.upper[j]);
        }
        let value = x.iter().zip(&lp.cost).map(|(a, c)| a * c).sum();
        LpResult::Optimal { x, value }
    }
}
