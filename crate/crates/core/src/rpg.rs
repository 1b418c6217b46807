//! Relaxed planning graph expansion with interval or LP-derived bounds.

use std::fmt::Write;

use num_traits::{Signed, Zero};

use crate::lpmodel::{Direction, FlowContext, FlowModel, GoalRows};
use crate::model::{ActionId, CmpOp, EffectOp, FactSet, GroundTask, NumericCondition, State, VarIdx};
use crate::num::{ExtQ, Interval, Q};

pub const NEVER: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpgMode {
    /// Interval arithmetic, each action applied once per layer.
    MetricFf,
    /// Bounds of tracked variables from flow-model LPs.
    Lp,
    /// Interval arithmetic with any number of applications per layer.
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpgStatus {
    GoalsReached,
    RelaxedUnsolvable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostVariant {
    Max,
    Sum,
}

#[derive(Clone, Debug)]
pub struct RpGraph<'c, 'a> {
    pub mode: RpgMode,
    /// `FP(i)`.
    pub facts: Vec<FactSet>,
    /// `FV(i)`.
    pub bounds: Vec<Vec<Interval>>,
    /// Actions first entering at each action layer; index 0 is empty.
    pub layers: Vec<Vec<ActionId>>,
    pub fact_first: Vec<usize>,
    pub action_first: Vec<usize>,
    pub status: RpgStatus,
    pub cost_sum: Vec<f64>,
    pub cost_max: Vec<f64>,
    pub fact_cost_sum: Vec<f64>,
    pub fact_cost_max: Vec<f64>,
    /// Flow model over every action in the graph (LP mode only).
    pub model: Option<FlowModel<'c, 'a>>,
}

/// Conditions that want a variable to go up or down, indexed by variable.
#[derive(Clone, Debug, Default)]
pub struct ConditionIndex {
    pub conds: Vec<NumericCondition>,
    pub up: Vec<Vec<usize>>,
    pub down: Vec<Vec<usize>>,
    /// For each action: indices of its numeric preconditions in `conds`.
    pub of_action: Vec<Vec<usize>>,
    /// Indices of the numeric goals in `conds`.
    pub goals: Vec<usize>,
}

impl ConditionIndex {
    pub fn new(task: &GroundTask) -> Self {
        let mut idx = ConditionIndex {
            up: vec![Vec::new(); task.num_vars()],
            down: vec![Vec::new(); task.num_vars()],
            ..Default::default()
        };
        for a in &task.actions {
            let ids = a.num_pre.iter().map(|c| idx.push(c)).collect();
            idx.of_action.push(ids);
        }
        idx.goals = task.goal_num.iter().map(|c| idx.push(c)).collect();
        idx
    }

    fn push(&mut self, c: &NumericCondition) -> usize {
        let i = self.conds.len();
        for (v, w) in &c.expr.terms {
            let pos = w.is_positive();
            let (wants_up, wants_down) = match c.op {
                CmpOp::Ge | CmpOp::Gt => (pos, !pos),
                CmpOp::Le | CmpOp::Lt => (!pos, pos),
                CmpOp::Eq => (true, true),
            };
            if wants_up {
                self.up[*v].push(i);
            }
            if wants_down {
                self.down[*v].push(i);
            }
        }
        self.conds.push(c.clone());
        i
    }
}

/// Change of `v` caused by one application of each effect, evaluated over `fv`.
fn effect_interval(op: EffectOp, magnitude: Interval) -> Interval {
    match op {
        EffectOp::Increase => magnitude,
        EffectOp::Decrease => magnitude.scale(-Q::from_integer(1)),
        EffectOp::Assign => magnitude,
    }
}

fn interval_step(task: &GroundTask, fv: &[Interval], active: &[ActionId], unlimited: bool, vars: impl Iterator<Item = VarIdx>) -> Vec<(VarIdx, Interval)> {
    let mut out = Vec::new();
    let mut want: Vec<bool> = vec![false; task.num_vars()];
    for v in vars {
        want[v] = true;
    }
    let mut next: Vec<Interval> = fv.to_vec();
    for &a in active {
        for e in &task.actions[a].num_eff {
            if !want[e.var] {
                continue;
            }
            let m = effect_interval(e.op, e.magnitude.eval_interval(fv));
            let cur = next[e.var];
            next[e.var] = match e.op {
                EffectOp::Assign => cur.hull(&m),
                _ => {
                    let up = m.hi.max(ExtQ::zero());
                    let down = m.lo.min(ExtQ::zero());
                    let (up, down) = if unlimited {
                        (
                            if up > ExtQ::zero() { ExtQ::PosInf } else { up },
                            if down < ExtQ::zero() { ExtQ::NegInf } else { down },
                        )
                    } else {
                        (up, down)
                    };
                    Interval::new(cur.lo + down, cur.hi + up)
                }
            };
        }
    }
    for (v, w) in want.iter().enumerate() {
        if *w {
            out.push((v, next[v]));
        }
    }
    out
}

/// Fixpoint of the unlimited-applications interval relaxation over `actions`.
pub fn unlimited_bounds(task: &GroundTask, start: &[Interval], actions: &[ActionId]) -> Vec<Interval> {
    let mut fv = start.to_vec();
    loop {
        let usable: Vec<ActionId> = actions
            .iter()
            .copied()
            .filter(|&a| task.actions[a].num_pre.iter().all(|c| c.satisfiable_in(&fv)))
            .collect();
        let next: Vec<Interval> = interval_step(task, &fv, &usable, true, 0..task.num_vars())
            .into_iter()
            .map(|(_, iv)| iv)
            .collect();
        let next: Vec<Interval> = next.iter().zip(&fv).map(|(a, b)| a.hull(b)).collect();
        if next == fv {
            return fv;
        }
        fv = next;
    }
}

pub struct ExpandArgs<'b> {
    pub mode: RpgMode,
    pub layer_cap: usize,
    /// Rows that must be jointly feasible before the goals count as reached.
    pub goal_rows: Option<GoalRows<'b>>,
    /// Keep a flow model in step with the layers even when bounds come from intervals.
    pub with_model: bool,
}

/// Builds the graph from `state` until the goals are reached or expansion stagnates.
pub fn expand<'c, 'a>(ctx: &'c FlowContext<'a>, conds: &ConditionIndex, state: &State, args: &ExpandArgs) -> RpGraph<'c, 'a> {
    let task = ctx.task;
    let nf = task.num_facts();
    let na = task.actions.len();
    let mut g = RpGraph {
        mode: args.mode,
        facts: vec![state.facts.clone()],
        bounds: vec![state.values.iter().map(|&x| Interval::point(x)).collect()],
        layers: vec![Vec::new()],
        fact_first: vec![NEVER; nf],
        action_first: vec![NEVER; na],
        status: RpgStatus::RelaxedUnsolvable,
        cost_sum: vec![f64::INFINITY; na],
        cost_max: vec![f64::INFINITY; na],
        fact_cost_sum: vec![f64::INFINITY; nf],
        fact_cost_max: vec![f64::INFINITY; nf],
        model: None,
    };
    for f in state.facts.iter() {
        g.fact_first[f] = 0;
        g.fact_cost_sum[f] = 0.0;
        g.fact_cost_max[f] = 0.0;
    }
    if args.mode == RpgMode::Lp || args.with_model {
        g.model = Some(FlowModel::new(ctx, &state.values, &state.facts));
    }
    let mut active: Vec<ActionId> = Vec::new();
    let mut i = 0;
    loop {
        if g.goals_reached(task, conds, args) {
            g.status = RpgStatus::GoalsReached;
            break;
        }
        if i >= args.layer_cap {
            log::warn!("relaxed planning graph hit the layer cap of {}", args.layer_cap);
            break;
        }
        let fp = &g.facts[i];
        let fv = &g.bounds[i];
        let new: Vec<ActionId> = task
            .actions
            .iter()
            .filter(|a| g.action_first[a.id] == NEVER)
            .filter(|a| fp.contains_all(&a.pre))
            .filter(|a| conds.of_action[a.id].iter().all(|&c| conds.conds[c].satisfiable_in(fv)))
            .map(|a| a.id)
            .collect();
        for &a in &new {
            g.action_first[a] = i + 1;
        }
        active.extend(&new);
        let mut facts = fp.clone();
        for &a in &new {
            for &f in &task.actions[a].add {
                if facts.insert(f) {
                    g.fact_first[f] = i + 1;
                }
            }
        }
        if let Some(m) = g.model.as_mut() {
            m.add_actions(new.iter().copied());
        }
        let next = g.next_bounds(ctx, conds, &active, i);
        if new.is_empty() && !relevant_change(conds, &g, &next, i) {
            break;
        }
        g.propagate_costs(task, &active);
        g.facts.push(facts);
        g.bounds.push(next);
        g.layers.push(new);
        i += 1;
    }
    g
}

/// Whether some condition not yet satisfiable at layer `i` sees a bound move its way.
fn relevant_change(conds: &ConditionIndex, g: &RpGraph, next: &[Interval], i: usize) -> bool {
    let fv = &g.bounds[i];
    let open = |c: usize| !conds.conds[c].satisfiable_in(fv);
    (0..fv.len()).any(|v| {
        (next[v].hi > fv[v].hi && conds.up[v].iter().any(|&c| open(c)))
            || (next[v].lo < fv[v].lo && conds.down[v].iter().any(|&c| open(c)))
    })
}

impl<'c, 'a> RpGraph<'c, 'a> {
    pub fn final_layer(&self) -> usize {
        self.facts.len() - 1
    }

    /// All actions in the graph, ordered by first layer.
    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.layers.iter().flatten().copied()
    }

    /// First fact layer at which `c` is satisfiable, if any.
    pub fn condition_layer(&self, c: &NumericCondition) -> Option<usize> {
        self.bounds.iter().position(|fv| c.satisfiable_in(fv))
    }

    fn goals_reached(&mut self, task: &GroundTask, conds: &ConditionIndex, args: &ExpandArgs) -> bool {
        let i = self.facts.len() - 1;
        if !self.facts[i].contains_all(&task.goal_facts) {
            return false;
        }
        if !conds.goals.iter().all(|&c| conds.conds[c].satisfiable_in(&self.bounds[i])) {
            return false;
        }
        match (&mut self.model, &args.goal_rows) {
            (Some(m), Some(rows)) if rows.any() => {
                m.push();
                m.add_goal_rows(rows);
                let ok = m.is_feasible();
                m.pop();
                ok
            }
            _ => true,
        }
    }

    fn next_bounds(&mut self, ctx: &FlowContext, conds: &ConditionIndex, active: &[ActionId], i: usize) -> Vec<Interval> {
        let task = ctx.task;
        let fv = self.bounds[i].clone();
        match self.mode {
            RpgMode::MetricFf | RpgMode::Unlimited => {
                let unlimited = self.mode == RpgMode::Unlimited;
                interval_step(task, &fv, active, unlimited, 0..task.num_vars())
                    .into_iter()
                    .map(|(_, iv)| iv)
                    .collect()
            }
            RpgMode::Lp => {
                let cls = ctx.cls;
                let untracked = (0..task.num_vars()).filter(|&v| !cls.vars[v].tracked);
                let mut next = fv.clone();
                for (v, iv) in interval_step(task, &fv, active, false, untracked) {
                    next[v] = iv;
                }
                let model = self.model.as_mut().expect("lp mode keeps a model");
                for v in cls.tracked_vars() {
                    let ups = active.iter().any(|&a| cls.delta(a, v).is_positive());
                    let downs = active.iter().any(|&a| cls.delta(a, v).is_negative());
                    let settled = |side: &[usize]| side.iter().all(|&c| conds.conds[c].satisfiable_in(&fv));
                    if ups && !settled(&conds.up[v]) {
                        next[v].hi = model.query_bound(v, Direction::Max, fv[v].hi);
                    }
                    if downs && !settled(&conds.down[v]) {
                        next[v].lo = model.query_bound(v, Direction::Min, fv[v].lo);
                    }
                }
                next
            }
        }
    }

    fn propagate_costs(&mut self, task: &GroundTask, active: &[ActionId]) {
        let mut fs = self.fact_cost_sum.clone();
        let mut fm = self.fact_cost_max.clone();
        for &a in active {
            let pre = &task.actions[a].pre;
            let s: f64 = pre.iter().map(|&p| self.fact_cost_sum[p]).sum();
            let m: f64 = pre.iter().map(|&p| self.fact_cost_max[p]).fold(0.0, f64::max);
            self.cost_sum[a] = s;
            self.cost_max[a] = m;
            for &f in &task.actions[a].add {
                fs[f] = fs[f].min(s + 1.0);
                fm[f] = fm[f].min(m + 1.0);
            }
        }
        self.fact_cost_sum = fs;
        self.fact_cost_max = fm;
    }

    pub fn action_cost(&self, a: ActionId, variant: CostVariant) -> f64 {
        match variant {
            CostVariant::Max => self.cost_max[a],
            CostVariant::Sum => self.cost_sum[a],
        }
    }

    /// Layer-by-layer text rendering.
    pub fn dump(&self, task: &GroundTask) -> String {
        let mut s = String::new();
        for i in 0..self.facts.len() {
            if i > 0 {
                let names: Vec<&str> = self.layers[i].iter().map(|&a| task.actions[a].name.as_str()).collect();
                let _ = writeln!(s, "A({i}) +{}: {}", names.len(), names.join(" "));
            }
            let new_facts: Vec<&str> = self.facts[i]
                .iter()
                .filter(|&f| self.fact_first[f] == i)
                .map(|f| task.facts[f].as_str())
                .collect();
            let _ = writeln!(s, "F({i}) +{}: {}", new_facts.len(), new_facts.join(" "));
            let vals: Vec<String> = self.bounds[i]
                .iter()
                .enumerate()
                .map(|(v, iv)| format!("{}={}", task.vars[v], iv))
                .collect();
            let _ = writeln!(s, "V({i}): {}", vals.join(" "));
        }
        let _ = writeln!(s, "status: {:?}", self.status);
        s
    }
}

/// Outcome of the resource-shortfall penalty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Penalty {
    Value(u64),
    DeadEnd,
}

/// `ceil((c - p - s) / dv)` when relaxed-plan consumption `c` exceeds production `p`
/// plus the stock `s` available above the variable's lower bound.
pub fn sapa_penalty(consumption: Q, production: Q, available: Q, max_step: Option<Q>) -> Penalty {
    let short = consumption - production - available;
    if short <= Q::zero() {
        return Penalty::Value(0);
    }
    match max_step {
        Some(d) if d.is_positive() => Penalty::Value((short / d).ceil().to_integer() as u64),
        _ => Penalty::DeadEnd,
    }
}

/// Per-variable penalty for a relaxed plan given as `(action, count)` pairs.
pub fn plan_penalty(cls: &crate::analysis::Classification, state: &State, plan: &[(ActionId, f64)]) -> Penalty {
    let mut total = 0u64;
    for v in cls.tracked_vars() {
        let crate::num::ExtQ::Fin(lb) = cls.vars[v].lb else {
            continue;
        };
        let mut c = Q::zero();
        let mut p = Q::zero();
        for &(a, n) in plan {
            let d = cls.delta(a, v);
            let n = crate::num::snap(n).unwrap_or_else(Q::zero);
            if d.is_negative() {
                c += -d * n;
            } else {
                p += d * n;
            }
        }
        match sapa_penalty(c, p, state.values[v] - lb, cls.max_step_production(v)) {
            Penalty::Value(x) => total += x,
            Penalty::DeadEnd => return Penalty::DeadEnd,
        }
    }
    Penalty::Value(total)
}
