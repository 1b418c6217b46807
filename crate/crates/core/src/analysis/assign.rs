use std::collections::BTreeSet;

use num_traits::Zero;

use crate::model::{ActionId, EffectOp, FactId, GroundTask, LinearExpr, VarIdx};
use crate::num::Q;

#[derive(Clone, Debug, PartialEq)]
pub struct AssignRewrite {
    pub task: GroundTask,
    pub rewritten: Vec<ActionId>,
    /// Variables whose assignments could not be turned into increases.
    pub rejected: Vec<(VarIdx, String)>,
}

fn adders(task: &GroundTask, f: FactId) -> BTreeSet<ActionId> {
    task.actions
        .iter()
        .filter(|a| a.add.contains(&f))
        .map(|a| a.id)
        .collect()
}

/// A fact `p` that nothing adds and that every member needs and deletes.
fn shares_one_shot_fact(task: &GroundTask, members: &BTreeSet<ActionId>) -> bool {
    let first = &task.actions[*members.iter().next().unwrap()];
    first.pre.iter().any(|&p| {
        first.del.contains(&p)
            && adders(task, p).is_empty()
            && members.iter().all(|&m| {
                let a = &task.actions[m];
                a.pre.contains(&p) && a.del.contains(&p)
            })
    })
}

/// A gate fact false initially, added by exactly `members`, and required by
/// every other action touching `v`.
fn has_gate(task: &GroundTask, v: VarIdx, members: &BTreeSet<ActionId>) -> bool {
    let first = &task.actions[*members.iter().next().unwrap()];
    first.add.iter().any(|&g| {
        !task.init.facts.contains(g)
            && adders(task, g) == *members
            && task
                .actions
                .iter()
                .filter(|a| !members.contains(&a.id))
                .filter(|a| a.reads(v) || a.effect_on(v).is_some())
                .all(|a| a.pre.contains(&g))
    })
}

/// Turns `v := k` into `increase v (k - v(I))` when the assigning actions
/// can only fire while `v` still holds its initial value.
pub fn rewrite_assignments(task: &GroundTask) -> AssignRewrite {
    let mut out = task.clone();
    let mut rewritten = BTreeSet::new();
    let mut rejected = Vec::new();
    for v in 0..task.num_vars() {
        let members: BTreeSet<ActionId> = task
            .actions
            .iter()
            .filter(|a| a.effect_on(v).is_some_and(|e| e.op == EffectOp::Assign))
            .map(|a| a.id)
            .collect();
        if members.is_empty() {
            continue;
        }
        let init = task.init.values[v];
        let constant = members.iter().all(|&m| {
            let a = &task.actions[m];
            a.effect_on(v).unwrap().magnitude.is_constant() && !a.reads(v)
        });
        if !constant {
            rejected.push((v, "assignment of a state-dependent value".to_string()));
            continue;
        }
        let others_touch = task
            .actions
            .iter()
            .any(|a| !members.contains(&a.id) && a.effect_on(v).is_some());
        let noop = !others_touch
            && members
                .iter()
                .all(|&m| task.actions[m].effect_on(v).unwrap().magnitude.constant == init);
        if !noop && !(shares_one_shot_fact(task, &members) && has_gate(task, v, &members)) {
            rejected.push((v, "assignment is not guarded by a one-shot gate".to_string()));
            continue;
        }
        for &m in &members {
            let e = out.actions[m]
                .num_eff
                .iter_mut()
                .find(|e| e.var == v)
                .unwrap();
            let d = e.magnitude.constant - init;
            if d < Q::zero() {
                e.op = EffectOp::Decrease;
                e.magnitude = LinearExpr::constant(-d);
            } else {
                e.op = EffectOp::Increase;
                e.magnitude = LinearExpr::constant(d);
            }
            rewritten.insert(m);
        }
    }
    AssignRewrite {
        task: out,
        rewritten: rewritten.into_iter().collect(),
        rejected,
    }
}
