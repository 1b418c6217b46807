use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::model::{ActionId, CmpOp, EffectOp, FactId, GroundTask, VarIdx};
use crate::num::{ExtQ, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarStatus {
    ProducerConsumer,
    CatalyticExtended,
    NonConforming(String),
}

impl VarStatus {
    pub fn is_conforming(&self) -> bool {
        !matches!(self, VarStatus::NonConforming(_))
    }
}

/// How one action relates to one variable it changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    SimpleProducer,
    BoundedProducer { max_prod: Q },
    Consumer { min_cons: ExtQ },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarClass {
    pub status: VarStatus,
    pub ub: ExtQ,
    pub lb: ExtQ,
    pub producers: Vec<ActionId>,
    pub consumers: Vec<ActionId>,
    /// Appears in some numeric precondition or goal.
    pub tracked: bool,
}

/// Actions sharing a threshold precondition on a variable they do not change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalyticGroup {
    pub var: VarIdx,
    /// `Ge` for `v >= threshold`, `Le` for `v <= threshold`.
    pub op: CmpOp,
    pub threshold: Q,
    pub actions: Vec<ActionId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneShotSet {
    pub fact: FactId,
    pub actions: Vec<ActionId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub vars: Vec<VarClass>,
    /// Per action: constant non-zero changes `(v, delta)`, sorted by variable.
    pub deltas: Vec<Vec<(VarIdx, Q)>>,
    pub roles: HashMap<(ActionId, VarIdx), Role>,
    pub catalytic: Vec<CatalyticGroup>,
    pub one_shot: Vec<OneShotSet>,
    /// Upper bound on how often each action can be applied.
    pub count_bound: Vec<Q>,
    /// Actions whose assignment effects were rewritten into increases.
    pub rewritten: Vec<ActionId>,
}

impl Classification {
    pub fn delta(&self, a: ActionId, v: VarIdx) -> Q {
        self.deltas[a]
            .iter()
            .find(|(u, _)| *u == v)
            .map(|(_, d)| *d)
            .unwrap_or_else(Q::zero)
    }

    /// True when every tracked variable fits the producer-consumer model.
    pub fn is_conforming(&self) -> bool {
        self.vars
            .iter()
            .all(|c| !c.tracked || c.status.is_conforming())
    }

    pub fn violations(&self) -> Vec<(VarIdx, &str)> {
        self.vars
            .iter()
            .enumerate()
            .filter_map(|(v, c)| match &c.status {
                VarStatus::NonConforming(why) if c.tracked => Some((v, why.as_str())),
                _ => None,
            })
            .collect()
    }

    /// The largest single-application increase of `v`, if any action produces it.
    pub fn max_step_production(&self, v: VarIdx) -> Option<Q> {
        self.vars[v]
            .producers
            .iter()
            .map(|&a| self.delta(a, v))
            .max()
    }

    pub fn tracked_vars(&self) -> impl Iterator<Item = VarIdx> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, c)| c.tracked)
            .map(|(v, _)| v)
    }

    /// Bounds used for the post-value column of `v` when starting from `s`.
    pub fn column_bounds(&self, v: VarIdx, s: Q) -> (ExtQ, ExtQ) {
        let c = &self.vars[v];
        (c.lb.min(ExtQ::Fin(s)), c.ub.max(ExtQ::Fin(s)))
    }
}

/// Classifies every variable of `task` as a producer-consumer variable, a
/// catalytic extension of one, or non-conforming.
pub fn classify(task: &GroundTask) -> Classification {
    let nv = task.num_vars();
    let mut tracked = vec![false; nv];
    for a in &task.actions {
        for c in &a.num_pre {
            for v in c.expr.vars() {
                tracked[v] = true;
            }
        }
    }
    for c in &task.goal_num {
        for v in c.expr.vars() {
            tracked[v] = true;
        }
    }

    let mut problems: Vec<Option<String>> = vec![None; nv];
    let mut flag = |v: VarIdx, why: String| {
        problems[v].get_or_insert(why);
    };
    let mut deltas: Vec<Vec<(VarIdx, Q)>> = vec![Vec::new(); task.actions.len()];
    let mut roles = HashMap::new();
    let mut producers = vec![Vec::new(); nv];
    let mut consumers = vec![Vec::new(); nv];
    let mut groups: BTreeMap<(VarIdx, bool, Q), Vec<ActionId>> = BTreeMap::new();
    let mut has_catalytic = vec![false; nv];

    for a in &task.actions {
        for c in &a.num_pre {
            if c.expr.terms.len() > 1 {
                for v in c.expr.vars() {
                    flag(v, format!("{} has a precondition over several variables", a.name));
                }
            }
        }
        for e in &a.num_eff {
            let v = e.var;
            if !e.magnitude.is_constant() {
                flag(v, format!("{} changes it by a state-dependent amount", a.name));
                continue;
            }
            if e.op == EffectOp::Assign {
                flag(v, format!("{} assigns to it", a.name));
                continue;
            }
            let d = e.constant_delta().unwrap_or_else(Q::zero);
            if d.is_zero() {
                continue;
            }
            deltas[a.id].push((v, d));
            let pres: Vec<_> = a
                .num_pre
                .iter()
                .filter(|c| c.single_var() == Some(v))
                .collect();
            let role = if d.is_positive() {
                match pres.as_slice() {
                    [] => Some(Role::SimpleProducer),
                    [c] if c.op == CmpOp::Le => Some(Role::BoundedProducer { max_prod: c.rhs + d }),
                    _ => None,
                }
            } else {
                match pres.as_slice() {
                    [] => Some(Role::Consumer { min_cons: ExtQ::NegInf }),
                    [c] if c.op == CmpOp::Ge => Some(Role::Consumer {
                        min_cons: ExtQ::Fin(c.rhs + d),
                    }),
                    _ => None,
                }
            };
            match role {
                Some(r) => {
                    roles.insert((a.id, v), r);
                    if d.is_positive() {
                        producers[v].push(a.id);
                    } else {
                        consumers[v].push(a.id);
                    }
                }
                None => flag(
                    v,
                    format!(
                        "{} {} it under an unsupported precondition",
                        a.name,
                        if d.is_positive() { "produces" } else { "consumes" }
                    ),
                ),
            }
        }
        for c in &a.num_pre {
            let Some(v) = c.single_var() else { continue };
            if a.effect_on(v).is_some() {
                continue;
            }
            has_catalytic[v] = true;
            match c.op {
                CmpOp::Ge | CmpOp::Gt => groups.entry((v, true, c.rhs)).or_default().push(a.id),
                CmpOp::Le | CmpOp::Lt => groups.entry((v, false, c.rhs)).or_default().push(a.id),
                CmpOp::Eq => {
                    groups.entry((v, true, c.rhs)).or_default().push(a.id);
                    groups.entry((v, false, c.rhs)).or_default().push(a.id);
                }
            }
        }
        for v in 0..nv {
            if a.effect_on(v).is_none() && a.num_pre.iter().any(|c| c.single_var() == Some(v) && c.op.is_strict()) {
                flag(v, format!("{} has a strict precondition on it", a.name));
            }
        }
    }

    let vars = (0..nv)
        .map(|v| {
            let ub = if producers[v].is_empty() {
                ExtQ::PosInf
            } else {
                producers[v]
                    .iter()
                    .map(|&a| match roles[&(a, v)] {
                        Role::BoundedProducer { max_prod } => ExtQ::Fin(max_prod),
                        _ => ExtQ::PosInf,
                    })
                    .max()
                    .unwrap_or(ExtQ::PosInf)
            };
            let lb = if consumers[v].is_empty() {
                ExtQ::NegInf
            } else {
                consumers[v]
                    .iter()
                    .map(|&a| match roles[&(a, v)] {
                        Role::Consumer { min_cons } => min_cons,
                        _ => ExtQ::NegInf,
                    })
                    .min()
                    .unwrap_or(ExtQ::NegInf)
            };
            let status = match problems[v].take() {
                Some(why) => VarStatus::NonConforming(why),
                None if has_catalytic[v] => VarStatus::CatalyticExtended,
                None => VarStatus::ProducerConsumer,
            };
            VarClass {
                status,
                ub,
                lb,
                producers: std::mem::take(&mut producers[v]),
                consumers: std::mem::take(&mut consumers[v]),
                tracked: tracked[v],
            }
        })
        .collect();

    let catalytic = groups
        .into_iter()
        .map(|((var, ge, threshold), actions)| CatalyticGroup {
            var,
            op: if ge { CmpOp::Ge } else { CmpOp::Le },
            threshold,
            actions,
        })
        .collect();

    Classification {
        vars,
        deltas,
        roles,
        catalytic,
        one_shot: Vec::new(),
        count_bound: Vec::new(),
        rewritten: Vec::new(),
    }
}

/// Groups the actions that need and delete a fact nothing re-adds.
pub fn detect_one_shot_sets(task: &GroundTask) -> Vec<OneShotSet> {
    let mut added = vec![false; task.num_facts()];
    for a in &task.actions {
        for &f in &a.add {
            added[f] = true;
        }
    }
    let mut sets: BTreeMap<FactId, Vec<ActionId>> = BTreeMap::new();
    for a in &task.actions {
        for &f in &a.pre {
            if !added[f] && a.del.contains(&f) {
                sets.entry(f).or_default().push(a.id);
            }
        }
    }
    sets.into_iter()
        .map(|(fact, actions)| OneShotSet { fact, actions })
        .collect()
}

pub const DEFAULT_COUNT_CAP: i64 = 1_000_000;

/// Fills `cls.count_bound` and `cls.one_shot`. An action consuming a variable
/// that nothing produces can run at most `(w(I) - lb(w)) / |delta|` times;
/// one-shot members at most once.
pub fn compute_count_bounds(task: &GroundTask, cls: &mut Classification, cap: Q) {
    cls.one_shot = detect_one_shot_sets(task);
    let mut bound = vec![cap; task.actions.len()];
    for (v, c) in cls.vars.iter().enumerate() {
        if !c.producers.is_empty() || !c.status.is_conforming() {
            continue;
        }
        let ExtQ::Fin(lb) = c.lb else { continue };
        let avail = (task.init.values[v] - lb).max(Q::zero());
        for &a in &c.consumers {
            let d = cls.delta(a, v).abs();
            let u = (avail / d).floor();
            if u < bound[a] {
                bound[a] = u;
            }
        }
    }
    for set in &cls.one_shot {
        for &a in &set.actions {
            bound[a] = bound[a].min(Q::from_integer(1));
        }
    }
    cls.count_bound = bound;
}

impl fmt::Display for VarStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarStatus::ProducerConsumer => f.write_str("producer-consumer"),
            VarStatus::CatalyticExtended => f.write_str("catalytic-extended"),
            VarStatus::NonConforming(why) => write!(f, "non-conforming ({why})"),
        }
    }
}
