//! Two-phase primal simplex over a dense tableau.
//!
//! Column bounds are handled implicitly (nonbasic columns sit at a finite
//! bound) so upper bounds never become rows. Entering and leaving choices
//! follow Bland's rule: the lowest-index improving column enters and ratio
//! ties leave by lowest basic column index.

use crate::model::{MpModel, MpSolution, RowOp, Sense, SolveStatus};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;

/// How a model column maps onto internal (finite-lower-bound) columns.
#[derive(Clone, Copy, Debug)]
enum ColumnMap {
    /// x = y
    Direct(usize),
    /// x = -y
    Negated(usize),
    /// x = y+ - y-
    Split(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// rows x cols, row-major: B^-1 A
    t: Vec<f64>,
    /// current values of the basic columns
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    pivots: usize,
    pivot_limit: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    Limit,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::AtLower => self.lower[j],
            State::AtUpper => self.upper[j],
            State::Basic => {
                let i = self.basis.iter().position(|&b| b == j).expect("basic column");
                self.beta[i]
            }
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (dj, tij) in d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize, d: &mut [f64]) {
        let cols = self.cols;
        let piv = self.t[r * cols + j];
        for k in 0..cols {
            self.t[r * cols + k] /= piv;
        }
        self.t[r * cols + j] = 1.0;
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[j];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[j] = 0.0;
            }
        }
        let f = d[j];
        if f != 0.0 {
            for (x, p) in d.iter_mut().zip(prow.iter()) {
                *x -= f * p;
            }
            d[j] = 0.0;
        }
    }

    /// Runs simplex iterations minimising `cost` from the current basis.
    fn run(&mut self, cost: &[f64]) -> Outcome {
        let mut d = self.reduced_costs(cost);
        loop {
            // Bland: lowest index improving column.
            let mut entering = None;
            for j in 0..self.cols {
                match self.state[j] {
                    State::Basic => {}
                    _ if self.upper[j] - self.lower[j] <= 0.0 => {}
                    State::AtLower if d[j] < -COST_EPS => {
                        entering = Some((j, 1.0));
                        break;
                    }
                    State::AtUpper if d[j] > COST_EPS => {
                        entering = Some((j, -1.0));
                        break;
                    }
                    _ => {}
                }
            }
            let Some((j, dir)) = entering else {
                return Outcome::Optimal;
            };
            if self.pivots >= self.pivot_limit {
                return Outcome::Limit;
            }

            let span = self.upper[j] - self.lower[j];
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.rows {
                let a = dir * self.at(i, j);
                let b = self.basis[i];
                let lim = if a > PIVOT_EPS {
                    (self.beta[i] - self.lower[b]) / a
                } else if a < -PIVOT_EPS && self.upper[b].is_finite() {
                    (self.upper[b] - self.beta[i]) / (-a)
                } else {
                    continue;
                };
                let lim = lim.max(0.0);
                best = match best {
                    None => Some((lim, i)),
                    Some((bl, bi)) => {
                        if lim < bl - 1e-12 || (lim <= bl + 1e-12 && b < self.basis[bi]) {
                            Some((lim, i))
                        } else {
                            Some((bl, bi))
                        }
                    }
                };
            }

            let flip = match best {
                None => {
                    if span.is_infinite() {
                        return Outcome::Unbounded;
                    }
                    true
                }
                Some((lim, _)) => span <= lim,
            };
            self.pivots += 1;

            if flip {
                for i in 0..self.rows {
                    let a = self.at(i, j);
                    if a != 0.0 {
                        self.beta[i] -= dir * span * a;
                    }
                }
                self.state[j] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                continue;
            }

            let (theta, r) = best.expect("ratio row");
            for i in 0..self.rows {
                let a = self.at(i, j);
                if a != 0.0 {
                    self.beta[i] -= dir * theta * a;
                }
            }
            let leaving = self.basis[r];
            let a_r = dir * self.at(r, j);
            self.state[leaving] = if a_r > 0.0 { State::AtLower } else { State::AtUpper };
            self.beta[r] = if dir > 0.0 {
                self.lower[j] + theta
            } else {
                self.upper[j] - theta
            };
            self.basis[r] = j;
            self.state[j] = State::Basic;
            self.pivot(r, j, &mut d);
        }
    }
}

/// Solves the continuous relaxation of `model` with the given column bounds.
pub(crate) fn solve_lp(model: &MpModel, bounds: &[(f64, f64)]) -> MpSolution {
    let cfg = model.config();
    let n = model.num_vars();
    let sign = match model.objective().sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let obj = &model.objective().coefficients;

    // Internal structural columns.
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut cost = Vec::new();
    let mut map = Vec::with_capacity(n);
    for (j, &(l, u)) in bounds.iter().enumerate() {
        if l > u + cfg.feasibility_tol {
            return MpSolution::without_values(SolveStatus::Infeasible, 0, 0);
        }
        let c = sign * obj.get(j).copied().unwrap_or(0.0);
        if l.is_finite() {
            map.push(ColumnMap::Direct(lower.len()));
            lower.push(l);
            upper.push(u.max(l));
            cost.push(c);
        } else if u.is_finite() {
            map.push(ColumnMap::Negated(lower.len()));
            lower.push(-u);
            upper.push(f64::INFINITY);
            cost.push(-c);
        } else {
            map.push(ColumnMap::Split(lower.len(), lower.len() + 1));
            lower.extend([0.0, 0.0]);
            upper.extend([f64::INFINITY, f64::INFINITY]);
            cost.extend([c, -c]);
        }
    }
    let n_struct = lower.len();

    let rows = model.num_constraints();
    // Dense row coefficients over structural internal columns.
    let mut a = vec![0.0; rows * n_struct];
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, k) in &c.terms {
            match map[v.0] {
                ColumnMap::Direct(p) => a[i * n_struct + p] += k,
                ColumnMap::Negated(p) => a[i * n_struct + p] -= k,
                ColumnMap::Split(p, q) => {
                    a[i * n_struct + p] += k;
                    a[i * n_struct + q] -= k;
                }
            }
        }
    }

    // Slack columns, then artificial columns.
    let mut slack_of_row: Vec<Option<(usize, f64)>> = vec![None; rows];
    let mut ncols = n_struct;
    for (i, c) in model.constraints().iter().enumerate() {
        let coef = match c.op {
            RowOp::Le => 1.0,
            RowOp::Ge => -1.0,
            RowOp::Eq => continue,
        };
        slack_of_row[i] = Some((ncols, coef));
        lower.push(0.0);
        upper.push(f64::INFINITY);
        cost.push(0.0);
        ncols += 1;
    }

    // Residuals with every structural column at its lower bound.
    let mut resid = vec![0.0; rows];
    for (i, c) in model.constraints().iter().enumerate() {
        let lhs: f64 = (0..n_struct).map(|p| a[i * n_struct + p] * lower[p]).sum();
        resid[i] = c.rhs - lhs;
    }

    let mut basis = vec![0; rows];
    let mut basis_coef = vec![1.0; rows];
    let mut artificial_of_row: Vec<Option<(usize, f64)>> = vec![None; rows];
    for i in 0..rows {
        match slack_of_row[i] {
            Some((col, coef)) if resid[i] * coef >= 0.0 => {
                basis[i] = col;
                basis_coef[i] = coef;
            }
            _ => {
                let coef = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
                artificial_of_row[i] = Some((ncols, coef));
                basis[i] = ncols;
                basis_coef[i] = coef;
                lower.push(0.0);
                upper.push(f64::INFINITY);
                cost.push(0.0);
                ncols += 1;
            }
        }
    }
    let first_artificial = n_struct + slack_of_row.iter().flatten().count();

    let mut t = vec![0.0; rows * ncols];
    let mut beta = vec![0.0; rows];
    for i in 0..rows {
        let inv = 1.0 / basis_coef[i];
        for p in 0..n_struct {
            t[i * ncols + p] = a[i * n_struct + p] * inv;
        }
        if let Some((col, coef)) = slack_of_row[i] {
            t[i * ncols + col] = coef * inv;
        }
        if let Some((col, coef)) = artificial_of_row[i] {
            t[i * ncols + col] = coef * inv;
        }
        beta[i] = resid[i] * inv;
    }
    let mut state = vec![State::AtLower; ncols];
    for &b in &basis {
        state[b] = State::Basic;
    }

    let mut tab = Tableau {
        rows,
        cols: ncols,
        t,
        beta,
        basis,
        state,
        lower,
        upper,
        pivots: 0,
        pivot_limit: cfg.pivot_limit,
    };

    if ncols > first_artificial {
        let phase1: Vec<f64> = (0..ncols)
            .map(|j| if j >= first_artificial { 1.0 } else { 0.0 })
            .collect();
        match tab.run(&phase1) {
            Outcome::Optimal => {}
            Outcome::Limit => {
                return MpSolution::without_values(SolveStatus::IterationLimit, tab.pivots, 0)
            }
            Outcome::Unbounded => unreachable!("phase one objective is bounded below"),
        }
        let infeas: f64 = (first_artificial..ncols).map(|j| tab.value(j)).sum();
        if infeas > cfg.feasibility_tol {
            return MpSolution::without_values(SolveStatus::Infeasible, tab.pivots, 0);
        }
        for j in first_artificial..ncols {
            tab.upper[j] = 0.0;
            if tab.state[j] == State::AtUpper {
                tab.state[j] = State::AtLower;
            }
        }
    }

    match tab.run(&cost) {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return MpSolution::without_values(SolveStatus::Unbounded, tab.pivots, 0)
        }
        Outcome::Limit => {
            return MpSolution::without_values(SolveStatus::IterationLimit, tab.pivots, 0)
        }
    }

    let mut internal = vec![0.0; ncols];
    for j in 0..ncols {
        internal[j] = match tab.state[j] {
            State::AtLower => tab.lower[j],
            State::AtUpper => tab.upper[j],
            State::Basic => 0.0,
        };
    }
    for (i, &b) in tab.basis.iter().enumerate() {
        internal[b] = tab.beta[i];
    }
    let values: Vec<f64> = map
        .iter()
        .map(|m| match *m {
            ColumnMap::Direct(p) => internal[p],
            ColumnMap::Negated(p) => -internal[p],
            ColumnMap::Split(p, q) => internal[p] - internal[q],
        })
        .collect();
    let objective = model.objective_value(&values);
    MpSolution {
        status: SolveStatus::Optimal,
        objective,
        values,
        pivots: tab.pivots,
        nodes: 0,
    }
}
