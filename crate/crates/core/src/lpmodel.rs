//! Flow models: LPs/MIPs over action-count columns.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use mpsolver::{Integrality, MpModel, MpSolution, RowId, RowOp, Sense, SolveStatus, VarId, VarKind};
use num_traits::Signed;

use crate::analysis::{Classification, LandmarkSet};
use crate::config::{HeuristicConfig, IntegralityPolicy};
use crate::model::{ActionId, CmpOp, FactId, FactSet, GroundTask, NumericCondition, VarIdx};
use crate::num::{snap, to_f64, ExtQ, Q};

/// Task-level indices shared by every flow model of one task.
#[derive(Clone, Debug)]
pub struct FlowContext<'a> {
    pub task: &'a GroundTask,
    pub cls: &'a Classification,
    groups_of: Vec<Vec<usize>>,
    one_shot_of: Vec<Vec<usize>>,
    pub adders: Vec<Vec<ActionId>>,
    pub requirers: Vec<Vec<ActionId>>,
    catalytic_vars: Vec<VarIdx>,
    cap: f64,
}

impl<'a> FlowContext<'a> {
    pub fn new(task: &'a GroundTask, cls: &'a Classification, cap: f64) -> Self {
        let na = task.actions.len();
        let mut groups_of = vec![Vec::new(); na];
        let mut catalytic_vars = Vec::new();
        for (g, grp) in cls.catalytic.iter().enumerate() {
            if !cls.vars[grp.var].tracked {
                continue;
            }
            for &a in &grp.actions {
                groups_of[a].push(g);
            }
            catalytic_vars.push(grp.var);
        }
        catalytic_vars.sort_unstable();
        catalytic_vars.dedup();
        let mut one_shot_of = vec![Vec::new(); na];
        for (i, set) in cls.one_shot.iter().enumerate() {
            for &a in &set.actions {
                one_shot_of[a].push(i);
            }
        }
        let mut adders = vec![Vec::new(); task.num_facts()];
        let mut requirers = vec![Vec::new(); task.num_facts()];
        for a in &task.actions {
            for &f in &a.add {
                adders[f].push(a.id);
            }
            for &f in &a.pre {
                requirers[f].push(a.id);
            }
        }
        FlowContext {
            task,
            cls,
            groups_of,
            one_shot_of,
            adders,
            requirers,
            catalytic_vars,
            cap,
        }
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Upper bound of the column for `a`.
    pub fn count_bound(&self, a: ActionId) -> f64 {
        to_f64(self.cls.count_bound[a]).min(self.cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

/// Work done by the solver on behalf of one or more flow models.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LpStats {
    pub solves: usize,
    pub build_time: Duration,
    pub solve_time: Duration,
}

impl LpStats {
    pub fn absorb(&mut self, other: &LpStats) {
        self.solves += other.solves;
        self.build_time += other.build_time;
        self.solve_time += other.solve_time;
    }
}

#[derive(Clone, Debug)]
struct CatCols {
    up: VarId,
    down: VarId,
    up_row: RowId,
    down_row: RowId,
}

/// Which goal-like rows to load into a model.
#[derive(Clone, Copy, Debug)]
pub struct GoalRows<'b> {
    pub numeric: bool,
    pub prop_goals: bool,
    /// Landmarks plus a per-landmark "already achieved" flag.
    pub landmarks: Option<(&'b LandmarkSet, &'b [bool])>,
    pub all_props: bool,
}

impl<'b> GoalRows<'b> {
    pub fn from_config(cfg: &HeuristicConfig, landmarks: &'b LandmarkSet, achieved: &'b [bool]) -> Self {
        GoalRows {
            numeric: cfg.lp_num_goal_conjunct,
            prop_goals: cfg.lp_prop_goals,
            landmarks: cfg.lp_landmarks.then_some((landmarks, achieved)),
            all_props: cfg.lp_all_props,
        }
    }

    pub fn any(&self) -> bool {
        self.numeric || self.prop_goals || self.landmarks.is_some() || self.all_props
    }
}

/// An LP over action counts built from a state and a set of actions.
#[derive(Clone, Debug)]
pub struct FlowModel<'c, 'a> {
    pub mp: MpModel,
    ctx: &'c FlowContext<'a>,
    start: Vec<Q>,
    facts: FactSet,
    col_of: Vec<Option<VarId>>,
    actions: Vec<ActionId>,
    post: Vec<Option<VarId>>,
    flow_row: Vec<Option<RowId>>,
    cat: Vec<Option<CatCols>>,
    /// Per catalytic group: switch column and link row.
    group_rows: Vec<Option<(VarId, RowId)>>,
    one_shot_rows: Vec<Option<RowId>>,
    pub stats: LpStats,
}

fn ext_to_f64(x: ExtQ) -> f64 {
    x.to_f64()
}

impl<'c, 'a> FlowModel<'c, 'a> {
    /// Flow rows `v' = S[v] + sum C_a delta(v,a)` for tracked variables, with
    /// catalytic and one-shot structure but no action columns yet.
    pub fn new(ctx: &'c FlowContext<'a>, values: &[Q], facts: &FactSet) -> Self {
        let t0 = Instant::now();
        let task = ctx.task;
        let cls = ctx.cls;
        let mut mp = MpModel::new();
        let nv = task.num_vars();
        let mut post = vec![None; nv];
        let mut flow_row = vec![None; nv];
        for v in cls.tracked_vars() {
            let (lo, hi) = cls.column_bounds(v, values[v]);
            let col = mp
                .add_variable(format!("v{v}"), ext_to_f64(lo), ext_to_f64(hi), VarKind::Continuous)
                .expect("valid bounds");
            let row = mp
                .add_constraint(format!("flow{v}"), vec![(col, 1.0)], RowOp::Eq, to_f64(values[v]))
                .expect("valid row");
            post[v] = Some(col);
            flow_row[v] = Some(row);
        }
        let mut cat = vec![None; nv];
        for &v in &ctx.catalytic_vars {
            let s = to_f64(values[v]);
            let up = mp
                .add_variable(format!("up{v}"), s, f64::INFINITY, VarKind::Continuous)
                .expect("valid bounds");
            let down = mp
                .add_variable(format!("down{v}"), f64::NEG_INFINITY, s, VarKind::Continuous)
                .expect("valid bounds");
            let up_row = mp
                .add_constraint(format!("upflow{v}"), vec![(up, 1.0)], RowOp::Eq, s)
                .expect("valid row");
            let down_row = mp
                .add_constraint(format!("downflow{v}"), vec![(down, 1.0)], RowOp::Eq, s)
                .expect("valid row");
            cat[v] = Some(CatCols {
                up,
                down,
                up_row,
                down_row,
            });
        }
        let mut group_rows = vec![None; cls.catalytic.len()];
        for (g, grp) in cls.catalytic.iter().enumerate() {
            let Some(cc) = &cat[grp.var] else { continue };
            let s_val = values[grp.var];
            let sw = mp.add_variable(format!("s{g}"), 0.0, 1.0, VarKind::Binary).expect("valid bounds");
            let link = mp
                .add_constraint(format!("link{g}"), vec![(sw, 0.0)], RowOp::Ge, 0.0)
                .expect("valid row");
            let gap = to_f64(grp.threshold - s_val);
            if grp.op == CmpOp::Ge {
                // up >= S + (c - S) s
                mp.add_constraint(format!("thr{g}"), vec![(cc.up, 1.0), (sw, -gap)], RowOp::Ge, to_f64(s_val))
                    .expect("valid row");
            } else {
                mp.add_constraint(format!("thr{g}"), vec![(cc.down, 1.0), (sw, -gap)], RowOp::Le, to_f64(s_val))
                    .expect("valid row");
            }
            group_rows[g] = Some((sw, link));
        }
        let mut one_shot_rows = vec![None; cls.one_shot.len()];
        for (i, set) in cls.one_shot.iter().enumerate() {
            if facts.contains(set.fact) {
                one_shot_rows[i] = Some(
                    mp.add_constraint(format!("once{i}"), Vec::new(), RowOp::Le, 1.0)
                        .expect("valid row"),
                );
            }
        }
        let mut stats = LpStats::default();
        stats.build_time += t0.elapsed();
        FlowModel {
            mp,
            ctx,
            start: values.to_vec(),
            facts: facts.clone(),
            col_of: vec![None; task.actions.len()],
            actions: Vec::new(),
            post,
            flow_row,
            cat,
            group_rows,
            one_shot_rows,
            stats,
        }
    }

    /// A model holding `actions` as columns.
    pub fn build(ctx: &'c FlowContext<'a>, values: &[Q], facts: &FactSet, actions: impl IntoIterator<Item = ActionId>) -> Self {
        let mut m = Self::new(ctx, values, facts);
        m.add_actions(actions);
        m
    }

    pub fn context(&self) -> &'c FlowContext<'a> {
        self.ctx
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn column(&self, a: ActionId) -> Option<VarId> {
        self.col_of[a]
    }

    pub fn post_column(&self, v: VarIdx) -> Option<VarId> {
        self.post[v]
    }

    pub fn switch_column(&self, group: usize) -> Option<VarId> {
        self.group_rows[group].map(|(s, _)| s)
    }

    pub fn add_actions(&mut self, actions: impl IntoIterator<Item = ActionId>) {
        for a in actions {
            self.add_action(a);
        }
    }

    pub fn add_action(&mut self, a: ActionId) {
        if self.col_of[a].is_some() {
            return;
        }
        let t0 = Instant::now();
        let ctx = self.ctx;
        let ub = ctx.count_bound(a);
        let col = self
            .mp
            .add_variable(format!("a{a}"), 0.0, ub, VarKind::Continuous)
            .expect("valid bounds");
        self.col_of[a] = Some(col);
        self.actions.push(a);
        for &(v, d) in &ctx.cls.deltas[a] {
            let d = to_f64(d);
            if let Some(row) = self.flow_row[v] {
                self.mp.add_term(row, col, -d).expect("valid term");
            }
            if let Some(cc) = &self.cat[v] {
                if d > 0.0 {
                    self.mp.add_term(cc.up_row, col, -d).expect("valid term");
                } else {
                    self.mp.add_term(cc.down_row, col, -d).expect("valid term");
                }
            }
        }
        for &g in &ctx.groups_of[a] {
            if let Some((sw, link)) = self.group_rows[g] {
                self.mp.add_term(link, sw, ub).expect("valid term");
                self.mp.add_term(link, col, -1.0).expect("valid term");
            }
        }
        for &i in &ctx.one_shot_of[a] {
            if let Some(row) = self.one_shot_rows[i] {
                self.mp.add_term(row, col, 1.0).expect("valid term");
            }
        }
        self.stats.build_time += t0.elapsed();
    }

    pub fn push(&mut self) {
        self.mp.push_scratch();
    }

    pub fn pop(&mut self) {
        self.mp.pop_scratch().expect("balanced scratch");
    }

    /// Fixes every column whose action first appears after `layer` to zero.
    pub fn restrict_to_layer(&mut self, first_layer: &[usize], layer: usize) {
        for &a in &self.actions {
            if first_layer[a] > layer {
                let col = self.col_of[a].unwrap();
                self.mp.set_bounds(col, 0.0, 0.0).expect("valid bounds");
            }
        }
    }

    fn condition_terms(&self, c: &NumericCondition) -> Option<Vec<(VarId, f64)>> {
        c.expr
            .terms
            .iter()
            .map(|(v, w)| self.post[*v].map(|col| (col, to_f64(*w))))
            .collect()
    }

    /// Adds `c` over post-value columns. Conditions on untracked variables are skipped.
    pub fn add_condition(&mut self, c: &NumericCondition) -> Option<RowId> {
        let terms = self.condition_terms(c)?;
        let op = match c.op {
            CmpOp::Ge | CmpOp::Gt => RowOp::Ge,
            CmpOp::Le | CmpOp::Lt => RowOp::Le,
            CmpOp::Eq => RowOp::Eq,
        };
        Some(self.mp.add_constraint("cond", terms, op, to_f64(c.rhs)).expect("valid row"))
    }

    /// `sum C_a >= 1` over the in-model actions of `achievers`. With none, the
    /// row is `0 >= 1` and the model becomes infeasible.
    pub fn add_cover(&mut self, name: &str, achievers: impl IntoIterator<Item = ActionId>) -> Vec<ActionId> {
        let mut used = Vec::new();
        let mut terms = Vec::new();
        for a in achievers {
            if let Some(col) = self.col_of[a] {
                terms.push((col, 1.0));
                used.push(a);
            }
        }
        self.mp.add_constraint(name, terms, RowOp::Ge, 1.0).expect("valid row");
        used
    }

    /// Loads goal, landmark and proposition rows. Returns the actions
    /// appearing in cover rows.
    pub fn add_goal_rows(&mut self, rows: &GoalRows) -> Vec<ActionId> {
        let t0 = Instant::now();
        let ctx = self.ctx;
        let task = ctx.task;
        let mut achievers: HashSet<ActionId> = HashSet::new();
        if rows.numeric {
            for c in &task.goal_num {
                self.add_condition(c);
            }
        }
        let mut covered: HashSet<FactId> = HashSet::new();
        if rows.prop_goals {
            for &g in &task.goal_facts {
                if !self.facts.contains(g) && covered.insert(g) {
                    achievers.extend(self.add_cover("goal", ctx.adders[g].iter().copied()));
                }
            }
        }
        if let Some((lms, achieved)) = rows.landmarks {
            for (i, &l) in lms.conjunctive.iter().enumerate() {
                if achieved[i] || self.facts.contains(l) || !covered.insert(l) {
                    continue;
                }
                achievers.extend(self.add_cover("lm", ctx.adders[l].iter().copied()));
            }
            let n = lms.conjunctive.len();
            for (i, d) in lms.disjunctive.iter().enumerate() {
                if achieved[n + i] || d.iter().any(|&f| self.facts.contains(f)) {
                    continue;
                }
                let mut all: Vec<ActionId> = d.iter().flat_map(|&f| ctx.adders[f].iter().copied()).collect();
                all.sort_unstable();
                all.dedup();
                achievers.extend(self.add_cover("lmor", all));
            }
        }
        if rows.all_props {
            for f in 0..task.num_facts() {
                if self.facts.contains(f) {
                    continue;
                }
                let req: Vec<VarId> = ctx.requirers[f].iter().filter_map(|&a| self.col_of[a]).collect();
                let is_goal = rows.prop_goals && task.goal_facts.contains(&f);
                if req.is_empty() && !is_goal {
                    continue;
                }
                let fv = self
                    .mp
                    .add_variable(format!("f{f}"), 0.0, 1.0, VarKind::Binary)
                    .expect("valid bounds");
                let mut adds: Vec<(VarId, f64)> = ctx.adders[f]
                    .iter()
                    .filter_map(|&a| self.col_of[a].map(|c| (c, 1.0)))
                    .collect();
                adds.push((fv, -1.0));
                self.mp.add_constraint(format!("add{f}"), adds, RowOp::Ge, 0.0).expect("valid row");
                let big: f64 = ctx.requirers[f]
                    .iter()
                    .filter(|&&a| self.col_of[a].is_some())
                    .map(|&a| ctx.count_bound(a))
                    .sum();
                let mut terms: Vec<(VarId, f64)> = req.iter().map(|&c| (c, -1.0)).collect();
                terms.push((fv, big.max(1.0)));
                self.mp.add_constraint(format!("req{f}"), terms, RowOp::Ge, 0.0).expect("valid row");
                if is_goal {
                    self.mp.set_bounds(fv, 1.0, 1.0).expect("valid bounds");
                }
            }
        }
        self.stats.build_time += t0.elapsed();
        let mut out: Vec<ActionId> = achievers.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Minimises `sum w(a) C_a`.
    pub fn set_weights(&mut self, weight: &dyn Fn(ActionId) -> f64) {
        let coefs: Vec<(VarId, f64)> = self
            .actions
            .iter()
            .map(|&a| (self.col_of[a].unwrap(), weight(a)))
            .collect();
        self.mp.set_objective(Sense::Minimize, coefs).expect("valid objective");
    }

    /// Marks action columns integral according to `policy`.
    pub fn apply_integrality(&mut self, policy: IntegralityPolicy, sets: &IntegralitySets) {
        let rewritten: HashSet<ActionId> = self.ctx.cls.rewritten.iter().copied().collect();
        for &a in &self.actions {
            let integral = match policy {
                IntegralityPolicy::All => true,
                _ => {
                    let lvl = policy.rank();
                    rewritten.contains(&a)
                        || (lvl >= 1 && sets.first_layer.contains(&a))
                        || (lvl >= 2 && sets.goal_achievers.contains(&a))
                        || (lvl >= 3 && sets.num_goal_affectors.contains(&a))
                }
            };
            if integral {
                self.mp
                    .set_variable_kind(self.col_of[a].unwrap(), VarKind::Integer)
                    .expect("valid column");
            }
        }
    }

    pub fn solve(&mut self, integrality: Integrality) -> MpSolution {
        let t0 = Instant::now();
        let sol = self.mp.solve_with(integrality);
        self.stats.solve_time += t0.elapsed();
        self.stats.solves += 1;
        if sol.status == SolveStatus::IterationLimit {
            log::warn!("flow model solve hit the iteration limit; treating as feasible");
        }
        sol
    }

    /// Feasibility of the pure LP relaxation.
    pub fn is_feasible(&mut self) -> bool {
        let sol = self.solve(Integrality::Relax);
        matches!(
            sol.status,
            SolveStatus::Optimal | SolveStatus::Unbounded | SolveStatus::IterationLimit
        )
    }

    /// Non-zero action counts of a solution.
    pub fn counts(&self, sol: &MpSolution) -> Vec<(ActionId, f64)> {
        let tol = self.mp.config().feasibility_tol;
        self.actions
            .iter()
            .filter_map(|&a| {
                let x = sol.value(self.col_of[a].unwrap());
                (x > tol).then_some((a, x))
            })
            .collect()
    }

    /// Best bound on `v'` in direction `dir` that is never tighter than `prev`.
    pub fn query_bound(&mut self, v: VarIdx, dir: Direction, prev: ExtQ) -> ExtQ {
        let Some(col) = self.post[v] else {
            return prev;
        };
        self.push();
        if let ExtQ::Fin(p) = prev {
            let op = if dir == Direction::Max { RowOp::Ge } else { RowOp::Le };
            self.mp
                .add_constraint("mono", vec![(col, 1.0)], op, to_f64(p))
                .expect("valid row");
        }
        let sense = if dir == Direction::Max { Sense::Maximize } else { Sense::Minimize };
        self.mp.set_objective(sense, vec![(col, 1.0)]).expect("valid objective");
        let sol = self.solve(Integrality::Relax);
        self.pop();
        let cap = self.ctx.cap;
        let result = match sol.status {
            SolveStatus::Unbounded => {
                if dir == Direction::Max {
                    ExtQ::PosInf
                } else {
                    ExtQ::NegInf
                }
            }
            SolveStatus::Optimal => {
                let at_cap = self.actions.iter().any(|&a| {
                    let d = self.ctx.cls.delta(a, v);
                    let helps = if dir == Direction::Max { d.is_positive() } else { d.is_negative() };
                    helps
                        && self.ctx.count_bound(a) >= cap
                        && sol.value(self.col_of[a].unwrap()) >= cap * (1.0 - 1e-9)
                });
                if at_cap {
                    if dir == Direction::Max {
                        ExtQ::PosInf
                    } else {
                        ExtQ::NegInf
                    }
                } else {
                    match snap(sol.value(col)) {
                        Some(x) => ExtQ::Fin(x),
                        None => prev,
                    }
                }
            }
            _ => {
                log::warn!("bound query on v{v} was not solved to optimality");
                prev
            }
        };
        match dir {
            Direction::Max => result.max(prev),
            Direction::Min => result.min(prev),
        }
    }

    /// Whether fixing the action columns to `counts` (others zero) leaves a
    /// feasible model, letting switch and fact columns take any value.
    pub fn admits_counts(&mut self, counts: &[(ActionId, u64)]) -> bool {
        self.push();
        for &a in &self.actions.clone() {
            let c = counts.iter().find(|(b, _)| *b == a).map(|(_, c)| *c).unwrap_or(0) as f64;
            let col = self.col_of[a].unwrap();
            let ub = self.mp.variable(col).upper;
            if c > ub + 1e-9 {
                self.pop();
                return false;
            }
            self.mp.set_bounds(col, c, c).expect("valid bounds");
        }
        let missing = counts.iter().any(|(a, c)| *c > 0 && self.col_of[*a].is_none());
        let sol = self.solve(Integrality::Respect);
        self.pop();
        !missing && sol.is_optimal()
    }

    pub fn start_value(&self, v: VarIdx) -> Q {
        self.start[v]
    }

    pub fn lp_text(&self) -> String {
        mpsolver::write_lp(&self.mp)
    }
}

/// Context sets consulted by the integrality policies.
#[derive(Clone, Debug, Default)]
pub struct IntegralitySets {
    pub first_layer: HashSet<ActionId>,
    pub goal_achievers: HashSet<ActionId>,
    pub num_goal_affectors: HashSet<ActionId>,
}

impl IntegralitySets {
    pub fn new(task: &GroundTask, first_layer: impl IntoIterator<Item = ActionId>, goal_achievers: impl IntoIterator<Item = ActionId>) -> Self {
        let goal_vars: HashSet<VarIdx> = task.goal_num.iter().flat_map(|c| c.expr.vars()).collect();
        let num_goal_affectors = task
            .actions
            .iter()
            .filter(|a| a.num_eff.iter().any(|e| goal_vars.contains(&e.var)))
            .map(|a| a.id)
            .collect();
        IntegralitySets {
            first_layer: first_layer.into_iter().collect(),
            goal_achievers: goal_achievers.into_iter().collect(),
            num_goal_affectors,
        }
    }
}

/// Objective weight of an action for the configured scheme.
pub fn action_weight(cfg: &HeuristicConfig, first_layer: usize, cost: f64) -> f64 {
    match cfg.weight {
        crate::config::WeightScheme::Layer(k) => k.powi(first_layer as i32),
        crate::config::WeightScheme::HAdd | crate::config::WeightScheme::HMax => 1.0 + cost,
    }
}
