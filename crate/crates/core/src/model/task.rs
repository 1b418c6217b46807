use std::fmt;

use num_traits::Zero;

use crate::num::{Interval, Q};

pub type FactId = usize;
pub type VarIdx = usize;
pub type ActionId = usize;

/// Fixed-size bit set over fact ids.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FactSet {
    words: Vec<u64>,
}

impl FactSet {
    pub fn new(universe: usize) -> Self {
        FactSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = FactId>) -> Self {
        let mut s = Self::new(universe);
        for id in ids {
            s.insert(id);
        }
        s
    }

    #[inline]
    pub fn contains(&self, id: FactId) -> bool {
        self.words
            .get(id / 64)
            .is_some_and(|w| w & (1u64 << (id % 64)) != 0)
    }

    #[inline]
    pub fn insert(&mut self, id: FactId) -> bool {
        let w = &mut self.words[id / 64];
        let bit = 1u64 << (id % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, id: FactId) {
        self.words[id / 64] &= !(1u64 << (id % 64));
    }

    pub fn contains_all(&self, ids: &[FactId]) -> bool {
        ids.iter().all(|&f| self.contains(f))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = FactId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

impl fmt::Debug for FactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `sum(w_i * v_i) + constant` with sorted, non-zero weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinearExpr {
    pub terms: Vec<(VarIdx, Q)>,
    pub constant: Q,
}

impl LinearExpr {
    pub fn constant(c: Q) -> Self {
        LinearExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: VarIdx) -> Self {
        LinearExpr {
            terms: vec![(v, Q::from_integer(1))],
            constant: Q::zero(),
        }
    }

    /// Builds an expression from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (VarIdx, Q)>, constant: Q) -> Self {
        let mut t: Vec<(VarIdx, Q)> = terms.into_iter().collect();
        t.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(VarIdx, Q)> = Vec::with_capacity(t.len());
        for (v, w) in t {
            match merged.last_mut() {
                Some((u, acc)) if *u == v => *acc += w,
                _ => merged.push((v, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        LinearExpr {
            terms: merged,
            constant,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, v: VarIdx) -> Q {
        self.terms
            .iter()
            .find(|(u, _)| *u == v)
            .map(|(_, w)| *w)
            .unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, values: &[Q]) -> Q {
        self.terms
            .iter()
            .fold(self.constant, |acc, (v, w)| acc + *w * values[*v])
    }

    pub fn eval_interval(&self, bounds: &[Interval]) -> Interval {
        self.terms.iter().fold(Interval::point(self.constant), |acc, (v, w)| {
            acc.add(&bounds[*v].scale(*w))
        })
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        LinearExpr::from_terms(
            self.terms.iter().chain(other.terms.iter()).copied(),
            self.constant + other.constant,
        )
    }

    pub fn scale(&self, k: Q) -> LinearExpr {
        LinearExpr::from_terms(self.terms.iter().map(|(v, w)| (*v, *w * k)), self.constant * k)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarIdx> + '_ {
        self.terms.iter().map(|(v, _)| *v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, lhs: Q, rhs: Q) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    /// The operator obtained by multiplying both sides by a negative number.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// `expr op rhs`, with the constant of `expr` folded into `rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumericCondition {
    pub expr: LinearExpr,
    pub op: CmpOp,
    pub rhs: Q,
}

impl NumericCondition {
    /// Normalises `expr op 0`: the constant moves to the right and a single
    /// variable gets coefficient one.
    pub fn normalized(expr: LinearExpr, op: CmpOp) -> Self {
        let rhs = -expr.constant;
        let mut expr = LinearExpr::from_terms(expr.terms, Q::zero());
        let mut op = op;
        let mut rhs = rhs;
        if expr.terms.len() == 1 {
            let w = expr.terms[0].1;
            if w != Q::from_integer(1) {
                expr.terms[0].1 = Q::from_integer(1);
                rhs /= w;
                if w < Q::zero() {
                    op = op.flip();
                }
            }
        }
        NumericCondition { expr, op, rhs }
    }

    pub fn holds(&self, values: &[Q]) -> bool {
        self.op.holds(self.expr.eval(values), self.rhs)
    }

    /// True if some point of the box `bounds` satisfies the condition.
    pub fn satisfiable_in(&self, bounds: &[Interval]) -> bool {
        let iv = self.expr.eval_interval(bounds);
        let r = crate::num::ExtQ::Fin(self.rhs);
        match self.op {
            CmpOp::Ge => iv.hi >= r,
            CmpOp::Gt => iv.hi > r,
            CmpOp::Le => iv.lo <= r,
            CmpOp::Lt => iv.lo < r,
            CmpOp::Eq => iv.lo <= r && r <= iv.hi,
        }
    }

    /// The single variable this condition is on, if it has exactly one.
    pub fn single_var(&self) -> Option<VarIdx> {
        match self.expr.terms.as_slice() {
            [(v, _)] => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EffectOp {
    Increase,
    Decrease,
    Assign,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumericEffect {
    pub var: VarIdx,
    pub op: EffectOp,
    pub magnitude: LinearExpr,
}

impl NumericEffect {
    pub fn apply(&self, values: &[Q]) -> Q {
        let m = self.magnitude.eval(values);
        match self.op {
            EffectOp::Increase => values[self.var] + m,
            EffectOp::Decrease => values[self.var] - m,
            EffectOp::Assign => m,
        }
    }

    /// The signed constant change, if this is an increase/decrease by a constant.
    pub fn constant_delta(&self) -> Option<Q> {
        if !self.magnitude.is_constant() {
            return None;
        }
        match self.op {
            EffectOp::Increase => Some(self.magnitude.constant),
            EffectOp::Decrease => Some(-self.magnitude.constant),
            EffectOp::Assign => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub id: ActionId,
    /// e.g. `(load cart1 p1)`
    pub name: String,
    pub pre: Vec<FactId>,
    pub num_pre: Vec<NumericCondition>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
    pub num_eff: Vec<NumericEffect>,
}

impl GroundAction {
    pub fn effect_on(&self, v: VarIdx) -> Option<&NumericEffect> {
        self.num_eff.iter().find(|e| e.var == v)
    }

    pub fn reads(&self, v: VarIdx) -> bool {
        self.num_pre.iter().any(|c| c.expr.coefficient(v) != Q::zero())
            || self
                .num_eff
                .iter()
                .any(|e| e.magnitude.coefficient(v) != Q::zero())
    }

    pub fn is_applicable(&self, state: &State) -> bool {
        state.facts.contains_all(&self.pre) && self.num_pre.iter().all(|c| c.holds(&state.values))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub facts: FactSet,
    pub values: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTask {
    pub name: String,
    pub facts: Vec<String>,
    pub vars: Vec<String>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal_facts: Vec<FactId>,
    pub goal_num: Vec<NumericCondition>,
}

/// Why an action could not be applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApplyError {
    MissingFact(FactId),
    NumericFailed(usize),
}

impl GroundTask {
    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn fact_id(&self, name: &str) -> Option<FactId> {
        self.facts.binary_search_by(|f| f.as_str().cmp(name)).ok()
    }

    pub fn var_id(&self, name: &str) -> Option<VarIdx> {
        self.vars.binary_search_by(|f| f.as_str().cmp(name)).ok()
    }

    pub fn action_by_name(&self, name: &str) -> Option<&GroundAction> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Successor state after checking every precondition of `a`.
    pub fn apply(&self, state: &State, a: &GroundAction) -> Result<State, ApplyError> {
        if let Some(&f) = a.pre.iter().find(|&&f| !state.facts.contains(f)) {
            return Err(ApplyError::MissingFact(f));
        }
        if let Some(i) = a.num_pre.iter().position(|c| !c.holds(&state.values)) {
            return Err(ApplyError::NumericFailed(i));
        }
        Ok(self.apply_unchecked(state, a))
    }

    /// Successor state without precondition checks. Deletes happen before adds.
    pub fn apply_unchecked(&self, state: &State, a: &GroundAction) -> State {
        let mut facts = state.facts.clone();
        for &f in &a.del {
            facts.remove(f);
        }
        for &f in &a.add {
            facts.insert(f);
        }
        let mut values = state.values.clone();
        for e in &a.num_eff {
            values[e.var] = e.apply(&state.values);
        }
        State { facts, values }
    }

    pub fn is_goal(&self, state: &State) -> bool {
        state.facts.contains_all(&self.goal_facts)
            && self.goal_num.iter().all(|c| c.holds(&state.values))
    }

    pub fn applicable(&self, state: &State) -> Vec<ActionId> {
        self.actions
            .iter()
            .filter(|a| a.is_applicable(state))
            .map(|a| a.id)
            .collect()
    }

    pub fn format_expr(&self, e: &LinearExpr) -> String {
        let mut parts: Vec<String> = e
            .terms
            .iter()
            .map(|(v, w)| {
                if *w == Q::from_integer(1) {
                    self.vars[*v].clone()
                } else {
                    format!("{}*{}", w, self.vars[*v])
                }
            })
            .collect();
        if !e.constant.is_zero() || parts.is_empty() {
            parts.push(e.constant.to_string());
        }
        parts.join(" + ")
    }

    pub fn format_condition(&self, c: &NumericCondition) -> String {
        format!("{} {} {}", self.format_expr(&c.expr), c.op.symbol(), c.rhs)
    }
}
