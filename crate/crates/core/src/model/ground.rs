//! Grounding of lifted ASTs into a [`GroundTask`].

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::Zero;

use super::ast::{AtomAst, ConditionAst, DomainAst, EffectAst, ExprAst, ProblemAst, Term};
use super::error::PddlError;
use super::task::{
    CmpOp, FactSet, GroundAction, GroundTask, LinearExpr, NumericCondition, NumericEffect, State,
};
use crate::num::Q;

pub const DEFAULT_ACTION_CAP: usize = 1_000_000;

/// Why an expression could not be folded into linear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoldError {
    /// A static function without a value in the initial state.
    Undefined(String),
    /// A product of two non-constant terms, or division by a non-constant.
    NonLinear(String),
    DivisionByZero,
}

/// Folds `e` into `sum(w_i * v_i) + k`. `fluent` resolves a function term to
/// either a constant or a variable expression.
pub fn linearize(
    e: &ExprAst,
    fluent: &mut dyn FnMut(&str, &[Term]) -> Result<LinearExpr, FoldError>,
) -> Result<LinearExpr, FoldError> {
    match e {
        ExprAst::Num(v) => Ok(LinearExpr::constant(*v)),
        ExprAst::Fluent(f, args) => fluent(f, args),
        ExprAst::Add(xs) => {
            let mut acc = LinearExpr::constant(Q::zero());
            for x in xs {
                acc = acc.add(&linearize(x, fluent)?);
            }
            Ok(acc)
        }
        ExprAst::Sub(a, b) => {
            let a = linearize(a, fluent)?;
            let b = linearize(b, fluent)?;
            Ok(a.add(&b.scale(-Q::from_integer(1))))
        }
        ExprAst::Neg(a) => Ok(linearize(a, fluent)?.scale(-Q::from_integer(1))),
        ExprAst::Mul(xs) => {
            let mut acc = LinearExpr::constant(Q::from_integer(1));
            for x in xs {
                let x = linearize(x, fluent)?;
                acc = if x.is_constant() {
                    acc.scale(x.constant)
                } else if acc.is_constant() {
                    x.scale(acc.constant)
                } else {
                    return Err(FoldError::NonLinear("product of two fluents".into()));
                };
            }
            Ok(acc)
        }
        ExprAst::Div(a, b) => {
            let a = linearize(a, fluent)?;
            let b = linearize(b, fluent)?;
            if !b.is_constant() {
                return Err(FoldError::NonLinear("division by a fluent".into()));
            }
            if b.constant.is_zero() {
                return Err(FoldError::DivisionByZero);
            }
            Ok(a.scale(Q::from_integer(1) / b.constant))
        }
    }
}

/// Evaluates an expression tree directly, without folding.
pub fn eval_expr(e: &ExprAst, fluent: &dyn Fn(&str, &[Term]) -> Option<Q>) -> Option<Q> {
    Some(match e {
        ExprAst::Num(v) => *v,
        ExprAst::Fluent(f, args) => fluent(f, args)?,
        ExprAst::Add(xs) => {
            let mut acc = Q::zero();
            for x in xs {
                acc += eval_expr(x, fluent)?;
            }
            acc
        }
        ExprAst::Sub(a, b) => eval_expr(a, fluent)? - eval_expr(b, fluent)?,
        ExprAst::Neg(a) => -eval_expr(a, fluent)?,
        ExprAst::Mul(xs) => {
            let mut acc = Q::from_integer(1);
            for x in xs {
                acc *= eval_expr(x, fluent)?;
            }
            acc
        }
        ExprAst::Div(a, b) => {
            let d = eval_expr(b, fluent)?;
            if d.is_zero() {
                return None;
            }
            eval_expr(a, fluent)? / d
        }
    })
}

fn ground_name(head: &str, args: &[String]) -> String {
    if args.is_empty() {
        format!("({head})")
    } else {
        format!("({} {})", head, args.join(" "))
    }
}

/// Result of folding one condition.
enum Folded {
    True,
    False,
    Cond(NumericCondition),
}

fn fold_condition(op: CmpOp, lhs: LinearExpr, rhs: LinearExpr) -> Folded {
    let diff = lhs.add(&rhs.scale(-Q::from_integer(1)));
    if diff.is_constant() {
        if op.holds(diff.constant, Q::zero()) {
            Folded::True
        } else {
            Folded::False
        }
    } else {
        Folded::Cond(NumericCondition::normalized(diff, op))
    }
}

struct Grounder {
    objects_of: HashMap<String, Vec<String>>,
    static_preds: HashSet<String>,
    static_funcs: HashSet<String>,
    init_facts: HashSet<String>,
    init_values: HashMap<String, Q>,
    facts: Interner,
    vars: Interner,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, name: String) -> usize {
        if let Some(&id) = self.ids.get(&name) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    /// Old id -> new id after sorting names.
    fn sorted(self) -> (Vec<String>, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let names = order.iter().map(|&i| self.names[i].clone()).collect();
        (names, remap)
    }
}

fn resolve(t: &Term, binding: &HashMap<&str, &str>) -> String {
    match t {
        Term::Var(v) => binding.get(v.as_str()).copied().unwrap_or(v).to_string(),
        Term::Const(c) => c.clone(),
    }
}

fn resolve_all(ts: &[Term], binding: &HashMap<&str, &str>) -> Vec<String> {
    ts.iter().map(|t| resolve(t, binding)).collect()
}

/// An action before ids are remapped.
struct Draft {
    name: String,
    pre: Vec<usize>,
    num_pre: Vec<NumericCondition>,
    add: Vec<usize>,
    del: Vec<usize>,
    num_eff: Vec<NumericEffect>,
}

impl Grounder {
    fn fluent_expr(
        &mut self,
        f: &str,
        args: &[Term],
        binding: &HashMap<&str, &str>,
    ) -> Result<LinearExpr, FoldError> {
        let name = ground_name(f, &resolve_all(args, binding));
        if self.static_funcs.contains(f) {
            self.init_values
                .get(&name)
                .map(|v| LinearExpr::constant(*v))
                .ok_or(FoldError::Undefined(name))
        } else {
            Ok(LinearExpr::var(self.vars.intern(name)))
        }
    }

    fn linear(&mut self, e: &ExprAst, binding: &HashMap<&str, &str>) -> Result<LinearExpr, FoldError> {
        linearize(e, &mut |f, args| self.fluent_expr(f, args, binding))
    }

    fn static_holds(&self, a: &AtomAst, binding: &HashMap<&str, &str>) -> bool {
        self.init_facts
            .contains(&ground_name(&a.pred, &resolve_all(&a.args, binding)))
    }

    fn non_linear(&self, what: String, ctx: &str) -> PddlError {
        PddlError::Unsupported {
            construct: format!("{what} in {ctx}"),
            line: 0,
        }
    }

    /// Grounds one binding. `Ok(None)` means the action is statically inapplicable.
    fn instantiate(
        &mut self,
        act: &super::ast::ActionAst,
        binding: &HashMap<&str, &str>,
        args: &[String],
    ) -> Result<Option<Draft>, PddlError> {
        let name = ground_name(&act.name, args);
        let mut d = Draft {
            name: name.clone(),
            pre: Vec::new(),
            num_pre: Vec::new(),
            add: Vec::new(),
            del: Vec::new(),
            num_eff: Vec::new(),
        };
        for c in &act.precondition {
            match c {
                ConditionAst::Atom(a) => {
                    if self.static_preds.contains(&a.pred) {
                        if !self.static_holds(a, binding) {
                            return Ok(None);
                        }
                    } else {
                        let f = self
                            .facts
                            .intern(ground_name(&a.pred, &resolve_all(&a.args, binding)));
                        if !d.pre.contains(&f) {
                            d.pre.push(f);
                        }
                    }
                }
                ConditionAst::Compare(op, l, r) => {
                    let folded = self
                        .linear(l, binding)
                        .and_then(|l| Ok((l, self.linear(r, binding)?)));
                    match folded {
                        Ok((l, r)) => match fold_condition(*op, l, r) {
                            Folded::True => {}
                            Folded::False => return Ok(None),
                            Folded::Cond(c) => d.num_pre.push(c),
                        },
                        Err(FoldError::Undefined(_)) | Err(FoldError::DivisionByZero) => return Ok(None),
                        Err(FoldError::NonLinear(w)) => return Err(self.non_linear(w, &name)),
                    }
                }
            }
        }
        for e in &act.effects {
            match e {
                EffectAst::Add(a) | EffectAst::Del(a) => {
                    let f = self
                        .facts
                        .intern(ground_name(&a.pred, &resolve_all(&a.args, binding)));
                    let list = if matches!(e, EffectAst::Add(_)) {
                        &mut d.add
                    } else {
                        &mut d.del
                    };
                    if !list.contains(&f) {
                        list.push(f);
                    }
                }
                EffectAst::Numeric(op, f, fargs, rhs) => {
                    let target = ground_name(f, &resolve_all(fargs, binding));
                    let var = self.vars.intern(target.clone());
                    let magnitude = match self.linear(rhs, binding) {
                        Ok(m) => m,
                        Err(FoldError::Undefined(_)) | Err(FoldError::DivisionByZero) => return Ok(None),
                        Err(FoldError::NonLinear(w)) => return Err(self.non_linear(w, &name)),
                    };
                    if d.num_eff.iter().any(|x| x.var == var) {
                        return Err(PddlError::Invalid(format!(
                            "{name} has more than one numeric effect on {target}"
                        )));
                    }
                    d.num_eff.push(NumericEffect {
                        var,
                        op: *op,
                        magnitude,
                    });
                }
            }
        }
        Ok(Some(d))
    }
}

/// Grounds with the default action cap.
pub fn ground(dom: &DomainAst, prob: &ProblemAst) -> Result<GroundTask, PddlError> {
    ground_with_cap(dom, prob, DEFAULT_ACTION_CAP)
}

pub fn ground_with_cap(dom: &DomainAst, prob: &ProblemAst, cap: usize) -> Result<GroundTask, PddlError> {
    let mut all_objects: Vec<(String, String)> = dom.constants.clone();
    all_objects.extend(prob.objects.iter().cloned());
    let mut objects_of: HashMap<String, Vec<String>> = HashMap::new();
    let mut types: BTreeSet<String> = dom.types.iter().map(|(t, _)| t.clone()).collect();
    types.insert("object".into());
    for t in &types {
        let mut objs: Vec<String> = all_objects
            .iter()
            .filter(|(_, ot)| dom.is_subtype(ot, t))
            .map(|(o, _)| o.clone())
            .collect();
        objs.sort();
        objs.dedup();
        objects_of.insert(t.clone(), objs);
    }

    let mut fluent_preds = HashSet::new();
    let mut fluent_funcs = HashSet::new();
    for a in &dom.actions {
        for e in &a.effects {
            match e {
                EffectAst::Add(at) | EffectAst::Del(at) => {
                    fluent_preds.insert(at.pred.clone());
                }
                EffectAst::Numeric(_, f, _, _) => {
                    fluent_funcs.insert(f.clone());
                }
            }
        }
    }
    let static_preds = dom
        .predicates
        .iter()
        .map(|p| p.name.clone())
        .filter(|p| !fluent_preds.contains(p))
        .collect();
    let static_funcs = dom
        .functions
        .iter()
        .map(|p| p.name.clone())
        .filter(|p| !fluent_funcs.contains(p))
        .collect();

    let mut g = Grounder {
        objects_of,
        static_preds,
        static_funcs,
        init_facts: prob
            .init_facts
            .iter()
            .map(|(p, args)| ground_name(p, args))
            .collect(),
        init_values: prob
            .init_values
            .iter()
            .map(|(f, args, v)| (ground_name(f, args), *v))
            .collect(),
        facts: Interner::default(),
        vars: Interner::default(),
    };

    let mut drafts: Vec<Draft> = Vec::new();
    for act in &dom.actions {
        let candidates: Vec<Vec<String>> = act
            .params
            .iter()
            .map(|(_, t)| g.objects_of.get(t).cloned().unwrap_or_default())
            .collect();
        // static atoms are checked as soon as their last parameter is bound
        let pidx: HashMap<&str, usize> = act
            .params
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (v.as_str(), i))
            .collect();
        let mut checks: Vec<Vec<&AtomAst>> = vec![Vec::new(); act.params.len() + 1];
        for c in &act.precondition {
            if let ConditionAst::Atom(a) = c {
                if g.static_preds.contains(&a.pred) {
                    let depth = a
                        .args
                        .iter()
                        .filter_map(|t| match t {
                            Term::Var(v) => pidx.get(v.as_str()).map(|i| i + 1),
                            Term::Const(_) => None,
                        })
                        .max()
                        .unwrap_or(0);
                    checks[depth].push(a);
                }
            }
        }
        if checks[0].iter().any(|a| !g.static_holds(a, &HashMap::new())) {
            continue;
        }
        let mut chosen: Vec<usize> = vec![0; act.params.len()];
        let mut depth = 0usize;
        // iterative backtracking over parameter bindings
        loop {
            if depth == act.params.len() {
                let args: Vec<String> = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| candidates[i][c].clone())
                    .collect();
                let binding: HashMap<&str, &str> = act
                    .params
                    .iter()
                    .zip(&args)
                    .map(|((v, _), o)| (v.as_str(), o.as_str()))
                    .collect();
                if let Some(d) = g.instantiate(act, &binding, &args)? {
                    drafts.push(d);
                    if drafts.len() > cap {
                        return Err(PddlError::TooManyActions(cap));
                    }
                }
                if depth == 0 {
                    break;
                }
                depth -= 1;
                chosen[depth] += 1;
                continue;
            }
            if chosen[depth] >= candidates[depth].len() {
                if depth == 0 {
                    break;
                }
                chosen[depth] = 0;
                depth -= 1;
                chosen[depth] += 1;
                continue;
            }
            let binding: HashMap<&str, &str> = act.params[..=depth]
                .iter()
                .enumerate()
                .map(|(i, (v, _))| (v.as_str(), candidates[i][chosen[i]].as_str()))
                .collect();
            if checks[depth + 1].iter().all(|a| g.static_holds(a, &binding)) {
                depth += 1;
                if depth < act.params.len() {
                    chosen[depth] = 0;
                }
            } else {
                chosen[depth] += 1;
            }
        }
    }

    // goal
    let empty = HashMap::new();
    let mut goal_facts = Vec::new();
    let mut goal_num = Vec::new();
    for c in &prob.goal {
        match c {
            ConditionAst::Atom(a) => {
                if g.static_preds.contains(&a.pred) && g.static_holds(a, &empty) {
                    continue;
                }
                goal_facts.push(g.facts.intern(ground_name(&a.pred, &resolve_all(&a.args, &empty))));
            }
            ConditionAst::Compare(op, l, r) => {
                let folded = g.linear(l, &empty).and_then(|l| Ok((l, g.linear(r, &empty)?)));
                match folded {
                    Ok((l, r)) => match fold_condition(*op, l, r) {
                        Folded::True => {}
                        Folded::False => goal_num.push(NumericCondition {
                            expr: LinearExpr::constant(Q::zero()),
                            op: CmpOp::Ge,
                            rhs: Q::from_integer(1),
                        }),
                        Folded::Cond(c) => goal_num.push(c),
                    },
                    Err(FoldError::NonLinear(w)) => return Err(g.non_linear(w, "the goal")),
                    Err(FoldError::Undefined(n)) => return Err(PddlError::MissingInitialValue(n)),
                    Err(FoldError::DivisionByZero) => {
                        return Err(PddlError::Invalid("division by zero in the goal".into()))
                    }
                }
            }
        }
    }
    // initial facts on fluent predicates
    let mut init_fact_ids = Vec::new();
    let mut init_list: Vec<&(String, Vec<String>)> = prob.init_facts.iter().collect();
    init_list.sort();
    for (p, args) in init_list {
        if !g.static_preds.contains(p) {
            init_fact_ids.push(g.facts.intern(ground_name(p, args)));
        }
    }

    let init_values = g.init_values.clone();
    let (fact_names, fremap) = std::mem::take(&mut g.facts).sorted();
    let (var_names, vremap) = std::mem::take(&mut g.vars).sorted();
    let mut values = Vec::with_capacity(var_names.len());
    for v in &var_names {
        match init_values.get(v) {
            Some(x) => values.push(*x),
            None => return Err(PddlError::MissingInitialValue(v.clone())),
        }
    }
    let rf = |ids: &[usize]| {
        let mut out: Vec<usize> = ids.iter().map(|&i| fremap[i]).collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let re = |e: &LinearExpr| {
        LinearExpr::from_terms(e.terms.iter().map(|(v, w)| (vremap[*v], *w)), e.constant)
    };
    let rc = |c: &NumericCondition| NumericCondition {
        expr: re(&c.expr),
        op: c.op,
        rhs: c.rhs,
    };

    drafts.sort_by(|a, b| a.name.cmp(&b.name));
    let actions: Vec<GroundAction> = drafts
        .iter()
        .enumerate()
        .map(|(id, d)| {
            let mut num_eff: Vec<NumericEffect> = d
                .num_eff
                .iter()
                .map(|e| NumericEffect {
                    var: vremap[e.var],
                    op: e.op,
                    magnitude: re(&e.magnitude),
                })
                .collect();
            num_eff.sort_by_key(|e| e.var);
            GroundAction {
                id,
                name: d.name.clone(),
                pre: rf(&d.pre),
                num_pre: d.num_pre.iter().map(rc).collect(),
                add: rf(&d.add),
                del: rf(&d.del),
                num_eff,
            }
        })
        .collect();

    let n = fact_names.len();
    Ok(GroundTask {
        name: prob.name.clone(),
        facts: fact_names,
        vars: var_names,
        actions,
        init: State {
            facts: FactSet::from_ids(n, init_fact_ids.iter().map(|&i| fremap[i])),
            values,
        },
        goal_facts: rf(&goal_facts),
        goal_num: goal_num.iter().map(rc).collect(),
    })
}

/// Parses and grounds a domain/problem pair.
pub fn load(domain_text: &str, problem_text: &str) -> Result<GroundTask, PddlError> {
    let dom = super::ast::parse_domain(domain_text)?;
    let prob = super::ast::parse_problem(problem_text, &dom)?;
    ground(&dom, &prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;

    const ROADS: &str = "
    (define (domain roads)
      (:types city)
      (:predicates (at ?c - city) (road ?a ?b - city))
      (:functions (fuel) (dist ?a ?b - city))
      (:action drive
        :parameters (?a ?b - city)
        :precondition (and (at ?a) (road ?a ?b) (>= (fuel) (dist ?a ?b)))
        :effect (and (not (at ?a)) (at ?b) (decrease (fuel) (dist ?a ?b)))))";

    #[test]
    fn static_pruning_and_folding() {
        let t = load(
            ROADS,
            "(define (problem p) (:domain roads) (:objects x y z - city)
               (:init (at x) (road x y) (road y z) (= (fuel) 10) (= (dist x y) 3) (= (dist y z) 4))
               (:goal (at z)))",
        )
        .unwrap();
        let names: Vec<&str> = t.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["(drive x y)", "(drive y z)"]);
        let a = &t.actions[0];
        assert_eq!(a.num_pre[0].rhs, q(3));
        assert_eq!(a.num_eff[0].constant_delta(), Some(q(-3)));
        assert_eq!(t.vars, vec!["(fuel)"]);
        assert_eq!(t.facts, vec!["(at x)", "(at y)", "(at z)"]);
    }

    #[test]
    fn undefined_static_value_prunes() {
        let t = load(
            ROADS,
            "(define (problem p) (:domain roads) (:objects x y - city)
               (:init (at x) (road x y) (road y x) (= (fuel) 10) (= (dist x y) 3))
               (:goal (at y)))",
        )
        .unwrap();
        assert_eq!(t.actions.len(), 1);
    }

    #[test]
    fn difference_condition() {
        let t = load(
            "(define (domain d) (:functions (x) (y))
               (:action a :parameters () :precondition (>= (- (x) (y)) 2) :effect (and (increase (x) 1) (increase (y) 1))))",
            "(define (problem p) (:domain d) (:init (= (x) 0) (= (y) 0)) (:goal (and)))",
        )
        .unwrap();
        let c = &t.actions[0].num_pre[0];
        assert_eq!(c.expr.terms, vec![(0, q(1)), (1, q(-1))]);
        assert_eq!((c.op, c.rhs), (CmpOp::Ge, q(2)));
    }

    #[test]
    fn product_of_fluents_is_rejected() {
        let err = load(
            "(define (domain d) (:functions (x) (y))
               (:action a :parameters () :precondition (>= (* (x) (y)) 2) :effect (and (increase (x) 1) (increase (y) 1))))",
            "(define (problem p) (:domain d) (:init (= (x) 0) (= (y) 0)) (:goal (and)))",
        );
        assert!(matches!(err, Err(PddlError::Unsupported { .. })));
    }

    #[test]
    fn double_effect_is_rejected() {
        let err = load(
            "(define (domain d) (:types t) (:functions (x ?a - t))
               (:action a :parameters (?p ?q - t) :effect (and (increase (x ?p) 1) (decrease (x ?q) 1))))",
            "(define (problem p) (:domain d) (:objects o - t) (:init (= (x o) 0)) (:goal (and)))",
        );
        assert!(matches!(err, Err(PddlError::Invalid(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let dom = super::super::ast::parse_domain(
            "(define (domain d) (:predicates (p ?a ?b))
               (:action a :parameters (?a ?b) :effect (p ?a ?b)))",
        )
        .unwrap();
        let prob = super::super::ast::parse_problem(
            "(define (problem p) (:domain d) (:objects a b c) (:init) (:goal (and)))",
            &dom,
        )
        .unwrap();
        assert_eq!(ground_with_cap(&dom, &prob, 100).unwrap().actions.len(), 9);
        assert_eq!(ground_with_cap(&dom, &prob, 5), Err(PddlError::TooManyActions(5)));
    }
}
