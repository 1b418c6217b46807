//! Rewriting of strict numeric inequalities into non-strict ones.

use num_traits::One;

use super::task::{CmpOp, EffectOp, GroundTask, NumericCondition, VarIdx};
use crate::num::{denominator_lcm, Q};

/// Where a condition lives in the task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionSite {
    Precondition { action: usize, index: usize },
    Goal { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictRewrite {
    pub task: GroundTask,
    /// Strict conditions left untouched because no value lattice is known.
    pub flagged: Vec<ConditionSite>,
}

/// Spacing of the set of values `v` can take: every reachable value is
/// `v(I) + m * step` for an integer `m`. `None` if some effect on `v` is not
/// a constant.
pub fn lattice_step(task: &GroundTask, v: VarIdx) -> Option<Q> {
    let mut consts = vec![task.init.values[v]];
    for a in &task.actions {
        if let Some(e) = a.effect_on(v) {
            if !e.magnitude.is_constant() {
                return None;
            }
            match e.op {
                EffectOp::Assign => consts.push(e.magnitude.constant - task.init.values[v]),
                _ => consts.push(e.magnitude.constant),
            }
        }
    }
    Some(Q::new(1, denominator_lcm(&consts)))
}

/// The smallest lattice point strictly above `k`.
fn next_above(base: Q, step: Q, k: Q) -> Q {
    let m = ((k - base) / step).floor() + Q::one();
    base + m * step
}

/// The largest lattice point strictly below `k`.
fn next_below(base: Q, step: Q, k: Q) -> Q {
    let m = ((k - base) / step).ceil() - Q::one();
    base + m * step
}

fn rewrite(task: &GroundTask, c: &NumericCondition) -> Option<NumericCondition> {
    let v = c.single_var()?;
    if c.expr.terms[0].1 != Q::one() {
        return None;
    }
    let step = lattice_step(task, v)?;
    let base = task.init.values[v];
    let (op, rhs) = match c.op {
        CmpOp::Gt => (CmpOp::Ge, next_above(base, step, c.rhs)),
        CmpOp::Lt => (CmpOp::Le, next_below(base, step, c.rhs)),
        _ => return Some(c.clone()),
    };
    Some(NumericCondition {
        expr: c.expr.clone(),
        op,
        rhs,
    })
}

/// Replaces `v > k` by `v >= k'` where `k'` is the next value `v` can take
/// (and likewise for `<`). With integral effects and initial value this is
/// `v >= k + 1`. Conditions over several variables or with non-constant
/// effects are kept and reported in `flagged`.
pub fn rewrite_strict_inequalities(task: &GroundTask) -> StrictRewrite {
    let mut out = task.clone();
    let mut flagged = Vec::new();
    for (ai, a) in out.actions.iter_mut().enumerate() {
        for (ci, c) in a.num_pre.iter_mut().enumerate() {
            if !c.op.is_strict() {
                continue;
            }
            match rewrite(task, c) {
                Some(r) => *c = r,
                None => flagged.push(ConditionSite::Precondition { action: ai, index: ci }),
            }
        }
    }
    for (ci, c) in out.goal_num.iter_mut().enumerate() {
        if !c.op.is_strict() {
            continue;
        }
        match rewrite(task, c) {
            Some(r) => *c = r,
            None => flagged.push(ConditionSite::Goal { index: ci }),
        }
    }
    StrictRewrite { task: out, flagged }
}
