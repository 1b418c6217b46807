//! Relaxed plan extraction from an expanded graph.

use std::collections::{BTreeMap, HashSet};

use mpsolver::{Integrality, SolveStatus};
use num_traits::{Signed, Zero};

use crate::config::{HeuristicConfig, WeightScheme};
use crate::lpmodel::{action_weight, GoalRows, IntegralitySets, LpStats};
use crate::model::{ActionId, CmpOp, EffectOp, FactId, GroundTask, LinearExpr, NumericCondition, State};
use crate::num::{ExtQ, Q};
use crate::rpg::{RpGraph, NEVER};

const REGRESSION_GUARD: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub action: ActionId,
    pub count: f64,
    pub layer: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicResult {
    /// `f64::INFINITY` marks a dead end.
    pub h: f64,
    pub helpful: Vec<ActionId>,
    pub trace: Vec<TraceEntry>,
    pub lp: LpStats,
    pub layers: usize,
}

impl HeuristicResult {
    pub fn dead_end(layers: usize, lp: LpStats) -> Self {
        HeuristicResult {
            h: f64::INFINITY,
            helpful: Vec::new(),
            trace: Vec::new(),
            lp,
            layers,
        }
    }

    pub fn is_dead_end(&self) -> bool {
        self.h.is_infinite()
    }

    /// `sum weight * count` over the trace.
    pub fn traced_h(&self) -> f64 {
        self.trace.iter().map(|t| t.weight * t.count).sum()
    }

    /// Total count per action over the trace.
    pub fn plan_counts(&self) -> Vec<(ActionId, f64)> {
        let mut m: BTreeMap<ActionId, f64> = BTreeMap::new();
        for t in &self.trace {
            *m.entry(t.action).or_default() += t.count;
        }
        m.into_iter().collect()
    }

    pub fn format_trace(&self, task: &GroundTask) -> String {
        let mut s = String::new();
        for t in &self.trace {
            s.push_str(&format!(
                "{} {} x{} w{}\n",
                t.layer, task.actions[t.action].name, t.count, t.weight
            ));
        }
        s.push_str(&format!("h = {}\n", self.h));
        s
    }
}

#[derive(Default, Debug)]
struct Bucket {
    props: BTreeMap<FactId, f64>,
    nums: Vec<(Vec<NumericCondition>, f64)>,
}

#[derive(Default, Debug)]
struct Queue {
    buckets: BTreeMap<usize, Bucket>,
}

impl Queue {
    fn prop(&mut self, layer: usize, f: FactId, w: f64) {
        let e = self.buckets.entry(layer).or_default().props.entry(f).or_insert(0.0);
        if *e < w {
            *e = w;
        }
    }

    fn num(&mut self, layer: usize, cs: Vec<NumericCondition>, w: f64) {
        let b = self.buckets.entry(layer).or_default();
        match b.nums.iter_mut().find(|(c, _)| *c == cs) {
            Some((_, k)) => {
                if *k < w {
                    *k = w;
                }
            }
            None => b.nums.push((cs, w)),
        }
    }

    fn pop_deepest(&mut self) -> Option<(usize, Bucket)> {
        self.buckets.pop_last()
    }
}

struct Extraction<'g, 'c, 'a> {
    task: &'a GroundTask,
    g: &'g RpGraph<'c, 'a>,
    q: Queue,
    h: f64,
    trace: Vec<TraceEntry>,
    first_choices: HashSet<ActionId>,
}

impl<'g, 'c, 'a> Extraction<'g, 'c, 'a> {
    fn new(task: &'a GroundTask, g: &'g RpGraph<'c, 'a>) -> Self {
        Extraction {
            task,
            g,
            q: Queue::default(),
            h: 0.0,
            trace: Vec::new(),
            first_choices: HashSet::new(),
        }
    }

    fn record(&mut self, a: ActionId, count: f64, layer: usize, w: f64) {
        self.h += w * count;
        self.trace.push(TraceEntry {
            action: a,
            count,
            layer,
            weight: w,
        });
        if self.g.action_first[a] == 1 {
            self.first_choices.insert(a);
        }
    }

    fn enqueue_fact(&mut self, f: FactId, w: f64) {
        let l = self.g.fact_first[f];
        if l != 0 && l != NEVER {
            self.q.prop(l, f, w);
        }
    }

    fn enqueue_condition(&mut self, c: &NumericCondition, w: f64) {
        if let Some(l) = self.g.condition_layer(c) {
            if l > 0 {
                self.q.num(l, vec![c.clone()], w);
            }
        }
    }

    /// Adds `a` with weight `w` and queues its preconditions.
    fn add_action(&mut self, a: ActionId, layer: usize, w: f64) {
        self.record(a, 1.0, layer, w);
        let act = &self.task.actions[a];
        for &p in &act.pre {
            self.enqueue_fact(p, w);
        }
        for c in &act.num_pre {
            self.enqueue_condition(c, w);
        }
    }

    /// Earliest-appearing achiever of `f` available by `layer`, lowest id first.
    fn achiever(&self, f: FactId, layer: usize) -> Option<ActionId> {
        self.task
            .actions
            .iter()
            .filter(|a| self.g.action_first[a.id] <= layer && a.add.contains(&f))
            .min_by_key(|a| (self.g.action_first[a.id], a.id))
            .map(|a| a.id)
    }

    fn achieve_props(&mut self, layer: usize, mut props: BTreeMap<FactId, f64>) {
        while let Some((&p, &w)) = props.iter().next() {
            props.remove(&p);
            let Some(a) = self.achiever(p, layer) else { continue };
            self.add_action(a, layer, w);
            for f in &self.task.actions[a].add {
                props.remove(f);
            }
        }
    }

    /// Regresses `cond` through in-layer actions of layer `layer`.
    fn achieve_numeric(&mut self, layer: usize, cond: &NumericCondition, w: f64) {
        for ge in as_ge(cond) {
            self.regress_ge(layer, &ge, w);
        }
    }

    fn regress_ge(&mut self, layer: usize, c: &NumericCondition, w: f64) {
        let prev = &self.g.bounds[layer - 1];
        // an in-layer assignment that satisfies the condition outright
        if let Some(v) = c.single_var() {
            let assigner = self
                .task
                .actions
                .iter()
                .filter(|a| self.g.action_first[a.id] <= layer)
                .filter(|a| {
                    a.effect_on(v).is_some_and(|e| {
                        e.op == EffectOp::Assign
                            && e.magnitude.is_constant()
                            && c.holds(&single_value(self.task.num_vars(), v, e.magnitude.constant))
                    })
                })
                .min_by_key(|a| (self.g.action_first[a.id], a.id))
                .map(|a| a.id);
            if c.expr.eval_interval(prev).hi < ExtQ::Fin(c.rhs) {
                if let Some(a) = assigner {
                    self.add_action(a, layer, w);
                    return;
                }
            }
        }
        let mut gains: Vec<(Q, ActionId)> = self
            .task
            .actions
            .iter()
            .filter(|a| self.g.action_first[a.id] <= layer)
            .filter_map(|a| {
                let gain = linear_gain(&c.expr, a);
                gain.is_positive().then_some((gain, a.id))
            })
            .collect();
        gains.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut need = c.rhs;
        let mut k = 0;
        while c.expr.eval_interval(prev).hi < ExtQ::Fin(need) {
            if gains.is_empty() || k >= REGRESSION_GUARD {
                log::warn!("numeric regression stopped without reaching its threshold");
                return;
            }
            let (gain, a) = gains[k % gains.len()];
            self.add_action(a, layer, w);
            need -= gain;
            k += 1;
        }
        let rest = NumericCondition {
            expr: c.expr.clone(),
            op: CmpOp::Ge,
            rhs: need,
        };
        self.enqueue_condition(&rest, w);
    }

    fn helpful(&self, state: &State) -> Vec<ActionId> {
        let task = self.task;
        let chosen: Vec<&crate::model::GroundAction> = self.first_choices.iter().map(|&a| &task.actions[a]).collect();
        let mut out: Vec<ActionId> = self
            .g
            .layers
            .get(1)
            .map(|l| l.as_slice())
            .unwrap_or(&[])
            .iter()
            .copied()
            .filter(|&a| {
                let b = &task.actions[a];
                self.first_choices.contains(&a) || chosen.iter().any(|c| shares_effect(c, b))
            })
            .filter(|&a| task.actions[a].is_applicable(state))
            .collect();
        out.sort_unstable();
        out
    }
}

fn single_value(n: usize, v: usize, x: Q) -> Vec<Q> {
    let mut vals = vec![Q::zero(); n];
    vals[v] = x;
    vals
}

/// Change of `expr` per application of `a`, counting constant effects only.
fn linear_gain(expr: &LinearExpr, a: &crate::model::GroundAction) -> Q {
    expr.terms
        .iter()
        .map(|(v, w)| match a.effect_on(*v) {
            Some(e) if e.op != EffectOp::Assign => *w * e.constant_delta().unwrap_or_else(Q::zero),
            _ => Q::zero(),
        })
        .sum()
}

/// Splits a condition into `expr >= c` conditions.
fn as_ge(c: &NumericCondition) -> Vec<NumericCondition> {
    let neg = |c: &NumericCondition| NumericCondition {
        expr: c.expr.scale(-Q::from_integer(1)),
        op: CmpOp::Ge,
        rhs: -c.rhs,
    };
    let pos = NumericCondition {
        expr: c.expr.clone(),
        op: CmpOp::Ge,
        rhs: c.rhs,
    };
    match c.op {
        CmpOp::Ge | CmpOp::Gt => vec![pos],
        CmpOp::Le | CmpOp::Lt => vec![neg(c)],
        CmpOp::Eq => vec![pos, neg(c)],
    }
}

fn shares_effect(a: &crate::model::GroundAction, b: &crate::model::GroundAction) -> bool {
    if a.add.iter().any(|f| b.add.contains(f)) {
        return true;
    }
    let raises = |x: &crate::model::GroundAction, v: usize| {
        x.effect_on(v).is_some_and(|e| match e.constant_delta() {
            Some(d) => d.is_positive(),
            None => e.op == EffectOp::Increase,
        })
    };
    a.num_eff.iter().any(|e| raises(a, e.var) && raises(b, e.var))
}

fn finish(mut ex: Extraction, state: &State, lp: LpStats) -> HeuristicResult {
    if !ex.task.is_goal(state) && ex.h <= 0.0 {
        ex.h = 1e-6;
    }
    let helpful = ex.helpful(state);
    HeuristicResult {
        h: ex.h,
        helpful,
        trace: ex.trace,
        lp,
        layers: ex.g.final_layer(),
    }
}

fn model_stats(g: &RpGraph) -> LpStats {
    g.model.as_ref().map(|m| m.stats).unwrap_or_default()
}

/// Relaxed plan extraction with unit weights and interval regression.
pub fn extract_metricff(g: &RpGraph, task: &GroundTask, state: &State) -> HeuristicResult {
    let mut ex = Extraction::new(task, g);
    for &f in &task.goal_facts {
        ex.enqueue_fact(f, 1.0);
    }
    for c in &task.goal_num {
        ex.enqueue_condition(c, 1.0);
    }
    while let Some((l, b)) = ex.q.pop_deepest() {
        ex.achieve_props(l, b.props);
        for (cs, w) in b.nums {
            for c in &cs {
                if c.satisfiable_in(&g.bounds[l - 1]) {
                    ex.enqueue_condition(c, w);
                } else {
                    ex.achieve_numeric(l, c, w);
                }
            }
        }
    }
    let lp = model_stats(g);
    finish(ex, state, lp)
}

/// Everything the LP-guided extraction needs beyond the graph.
pub struct LpExtractArgs<'b> {
    pub cfg: &'b HeuristicConfig,
    pub goal_rows: GoalRows<'b>,
    /// Achievers of goal and landmark facts.
    pub goal_achievers: &'b [ActionId],
}

/// Relaxed plan extraction where numeric subgoals are handed to the flow model.
/// Returns `None` when the solve budget runs out.
pub fn extract_lprpg(g: &mut RpGraph, task: &GroundTask, state: &State, args: &LpExtractArgs) -> Option<HeuristicResult> {
    let cfg = args.cfg;
    let final_layer = g.final_layer();
    let first = g.action_first.clone();
    let costs: Vec<f64> = match cfg.weight {
        WeightScheme::HMax => g.cost_max.clone(),
        _ => g.cost_sum.clone(),
    };
    let weight = |a: ActionId| action_weight(cfg, first[a], costs[a]);
    let sets = IntegralitySets::new(task, g.layers.get(1).cloned().unwrap_or_default(), args.goal_achievers.iter().copied());
    let mut model = g.model.take().expect("lp extraction needs a flow model");
    let mut solves = 0usize;

    let mut ex = Extraction::new(task, g);
    let goal_lp = args.goal_rows.prop_goals || args.goal_rows.numeric;
    let mut seeded_by_lp = false;
    if goal_lp && !task.is_goal(state) {
        model.push();
        model.add_goal_rows(&args.goal_rows);
        model.set_weights(&weight);
        model.apply_integrality(cfg.ints, &sets);
        let sol = model.solve(Integrality::Respect);
        solves += 1;
        if sol.status == SolveStatus::Optimal {
            seeded_by_lp = true;
            for (a, c) in model.counts(&sol) {
                ex.record(a, c, first[a], 1.0);
                let wc = c.min(1.0);
                for &p in &task.actions[a].pre {
                    ex.enqueue_fact(p, wc);
                }
            }
        }
        model.pop();
    }
    if !(seeded_by_lp && args.goal_rows.prop_goals) {
        for &f in &task.goal_facts {
            ex.enqueue_fact(f, 1.0);
        }
    }
    if !(seeded_by_lp && args.goal_rows.numeric) {
        let ng: Vec<NumericCondition> = task
            .goal_num
            .iter()
            .filter(|c| ex.g.condition_layer(c).is_some_and(|l| l > 0))
            .cloned()
            .collect();
        if ng.len() > 1 {
            ex.q.num(final_layer, ng, 1.0);
        } else if let Some(c) = ng.first() {
            ex.enqueue_condition(c, 1.0);
        }
    }

    let mut dead = false;
    while let Some((l, b)) = ex.q.pop_deepest() {
        ex.achieve_props(l, b.props);
        for (cs, w) in b.nums {
            if solves >= cfg.lp_budget {
                g.model = Some(model);
                return None;
            }
            model.push();
            model.restrict_to_layer(&first, l);
            for c in &cs {
                model.add_condition(c);
            }
            model.set_weights(&weight);
            model.apply_integrality(cfg.ints, &sets);
            let sol = model.solve(Integrality::Respect);
            solves += 1;
            model.pop();
            if matches!(sol.status, SolveStatus::Optimal | SolveStatus::IterationLimit) && !sol.values.is_empty() {
                for (a, c) in model.counts(&sol) {
                    ex.record(a, c, first[a], w);
                    let wc = w * c.min(1.0);
                    for &p in &task.actions[a].pre {
                        ex.enqueue_fact(p, wc);
                    }
                }
            } else if l < final_layer {
                ex.q.num(l + 1, cs, w);
            } else {
                dead = true;
                break;
            }
        }
    }
    let lp = model.stats;
    let res = if dead {
        HeuristicResult::dead_end(final_layer, lp)
    } else {
        finish(ex, state, lp)
    };
    g.model = Some(model);
    Some(res)
}
