//! Producer-consumer classification, one-shot sets, count bounds,
//! assignment rewriting and landmark extraction.

mod assign;
mod classify;
mod landmarks;

use std::fmt::Write;

pub use assign::{rewrite_assignments, AssignRewrite};
pub use classify::{
    classify, compute_count_bounds, detect_one_shot_sets, CatalyticGroup, Classification,
    OneShotSet, Role, VarClass, VarStatus, DEFAULT_COUNT_CAP,
};
pub use landmarks::{extract_landmarks, relaxed_reachable, LandmarkSet};

use crate::model::{rewrite_strict_inequalities, ConditionSite, GroundTask};
use crate::num::Q;

/// Everything derived from a task before search starts.
#[derive(Clone, Debug)]
pub struct Analysis {
    /// The task search runs on: strict conditions and assignments rewritten.
    pub task: GroundTask,
    pub classification: Classification,
    /// Landmarks of the initial state.
    pub landmarks: LandmarkSet,
    pub strict_flagged: Vec<ConditionSite>,
    pub rejected_assignments: Vec<(usize, String)>,
}

impl Analysis {
    pub fn new(task: &GroundTask) -> Self {
        Self::with_cap(task, Q::from_integer(DEFAULT_COUNT_CAP))
    }

    pub fn with_cap(task: &GroundTask, cap: Q) -> Self {
        let strict = rewrite_strict_inequalities(task);
        let rw = rewrite_assignments(&strict.task);
        let task = rw.task;
        let mut cls = classify(&task);
        cls.rewritten = rw.rewritten;
        for (v, why) in &rw.rejected {
            cls.vars[*v].status = VarStatus::NonConforming(why.clone());
        }
        compute_count_bounds(&task, &mut cls, cap);
        let landmarks = extract_landmarks(&task, &task.init);
        Analysis {
            task,
            classification: cls,
            landmarks,
            strict_flagged: strict.flagged,
            rejected_assignments: rw.rejected,
        }
    }

    /// One line per variable, catalytic group, one-shot set and landmark.
    pub fn report(&self) -> String {
        let t = &self.task;
        let c = &self.classification;
        let mut s = String::new();
        for (v, vc) in c.vars.iter().enumerate() {
            let _ = writeln!(
                s,
                "var {} {}{} lb={} ub={} prod={} cons={}",
                t.vars[v],
                vc.status,
                if vc.tracked { "" } else { " untracked" },
                vc.lb,
                vc.ub,
                vc.producers.len(),
                vc.consumers.len()
            );
        }
        for g in &c.catalytic {
            let _ = writeln!(
                s,
                "catalytic {} {} {} actions={}",
                t.vars[g.var],
                g.op.symbol(),
                g.threshold,
                g.actions.len()
            );
        }
        for o in &c.one_shot {
            let _ = writeln!(s, "one-shot {} actions={}", t.facts[o.fact], o.actions.len());
        }
        for &a in &c.rewritten {
            let _ = writeln!(s, "assignment-rewritten {}", t.actions[a].name);
        }
        for &f in &self.landmarks.conjunctive {
            let _ = writeln!(s, "landmark {}", t.facts[f]);
        }
        for d in &self.landmarks.disjunctive {
            let names: Vec<&str> = d.iter().map(|&f| t.facts[f].as_str()).collect();
            let _ = writeln!(s, "landmark-or {}", names.join(" | "));
        }
        s
    }
}
