use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::model::{ActionId, FactId, FactSet, GroundTask, State};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LandmarkSet {
    pub conjunctive: Vec<FactId>,
    pub disjunctive: Vec<Vec<FactId>>,
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        self.conjunctive.len() + self.disjunctive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Landmark indices (conjunctive first, then disjunctive) satisfied by `facts`.
    pub fn satisfied_by<'a>(&'a self, facts: &'a FactSet) -> impl Iterator<Item = usize> + 'a {
        let n = self.conjunctive.len();
        self.conjunctive
            .iter()
            .enumerate()
            .filter(|(_, f)| facts.contains(**f))
            .map(|(i, _)| i)
            .chain(
                self.disjunctive
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.iter().any(|f| facts.contains(*f)))
                    .map(move |(i, _)| n + i),
            )
    }
}

/// Facts reachable from `facts` ignoring deletes, numeric conditions and
/// the actions in `excluded`.
pub fn relaxed_reachable(task: &GroundTask, facts: &FactSet, excluded: &HashSet<ActionId>) -> FactSet {
    let mut reached = facts.clone();
    let mut missing: Vec<usize> = task
        .actions
        .iter()
        .map(|a| a.pre.iter().filter(|&&p| !reached.contains(p)).count())
        .collect();
    let mut users: Vec<Vec<ActionId>> = vec![Vec::new(); task.num_facts()];
    for a in &task.actions {
        for &p in &a.pre {
            users[p].push(a.id);
        }
    }
    let mut queue: Vec<ActionId> = task
        .actions
        .iter()
        .filter(|a| missing[a.id] == 0 && !excluded.contains(&a.id))
        .map(|a| a.id)
        .collect();
    while let Some(a) = queue.pop() {
        for &f in &task.actions[a].add {
            if reached.insert(f) {
                for &u in &users[f] {
                    missing[u] -= 1;
                    if missing[u] == 0 && !excluded.contains(&u) {
                        queue.push(u);
                    }
                }
            }
        }
    }
    reached
}

fn predicate(name: &str) -> &str {
    name.trim_start_matches('(')
        .split([' ', ')'])
        .next()
        .unwrap_or("")
}

struct Extractor<'a> {
    task: &'a GroundTask,
    state: &'a State,
    achievers: Vec<Vec<ActionId>>,
}

impl Extractor<'_> {
    /// Goals become unreachable once every achiever of `facts` is removed.
    fn verified(&self, facts: &[FactId]) -> bool {
        let excluded: HashSet<ActionId> = facts
            .iter()
            .flat_map(|&f| self.achievers[f].iter().copied())
            .collect();
        let r = relaxed_reachable(self.task, &self.state.facts, &excluded);
        !self.task.goal_facts.iter().all(|&g| r.contains(g))
    }

    /// Achievers that can fire before `f` is first reached.
    fn first_achievers(&self, f: FactId) -> Vec<ActionId> {
        let excluded: HashSet<ActionId> = self.achievers[f].iter().copied().collect();
        let r = relaxed_reachable(self.task, &self.state.facts, &excluded);
        self.achievers[f]
            .iter()
            .copied()
            .filter(|&a| r.contains_all(&self.task.actions[a].pre))
            .collect()
    }
}

/// Backchains from the goals over shared preconditions of first achievers.
/// Every emitted landmark is checked by relaxed unreachability.
pub fn extract_landmarks(task: &GroundTask, state: &State) -> LandmarkSet {
    let mut achievers = vec![Vec::new(); task.num_facts()];
    for a in &task.actions {
        for &f in &a.add {
            achievers[f].push(a.id);
        }
    }
    let ex = Extractor {
        task,
        state,
        achievers,
    };
    let cap = 10 * task.goal_facts.len().max(1);
    let mut out = LandmarkSet::default();
    let reachable = relaxed_reachable(task, &state.facts, &HashSet::new());
    if !task.goal_facts.iter().all(|&g| reachable.contains(g)) {
        return out;
    }
    let mut seen: BTreeSet<FactId> = BTreeSet::new();
    let mut seen_disj: BTreeSet<Vec<FactId>> = BTreeSet::new();
    let mut queue: Vec<FactId> = Vec::new();
    for &g in &task.goal_facts {
        if !state.facts.contains(g) && seen.insert(g) {
            out.conjunctive.push(g);
            queue.push(g);
        }
    }
    let mut head = 0;
    while head < queue.len() && out.len() < cap {
        let l = queue[head];
        head += 1;
        let first = ex.first_achievers(l);
        if first.is_empty() {
            continue;
        }
        let mut shared: BTreeSet<FactId> = task.actions[first[0]].pre.iter().copied().collect();
        for &a in &first[1..] {
            let pre: BTreeSet<FactId> = task.actions[a].pre.iter().copied().collect();
            shared = shared.intersection(&pre).copied().collect();
        }
        shared.retain(|&p| !state.facts.contains(p));
        let mut found = false;
        for p in shared {
            if out.len() >= cap {
                break;
            }
            if seen.contains(&p) {
                found = true;
                continue;
            }
            if ex.verified(&[p]) {
                seen.insert(p);
                out.conjunctive.push(p);
                queue.push(p);
                found = true;
            }
        }
        if found || first.len() < 2 {
            continue;
        }
        // every first achiever needs some fact of one predicate
        let mut by_pred: BTreeMap<&str, Vec<BTreeSet<FactId>>> = BTreeMap::new();
        for &a in &first {
            let mut here: BTreeMap<&str, BTreeSet<FactId>> = BTreeMap::new();
            for &p in &task.actions[a].pre {
                if !state.facts.contains(p) {
                    here.entry(predicate(&task.facts[p])).or_default().insert(p);
                }
            }
            for (pred, fs) in here {
                by_pred.entry(pred).or_default().push(fs);
            }
        }
        for (_, per_action) in by_pred {
            if per_action.len() != first.len() || out.len() >= cap {
                continue;
            }
            let union: BTreeSet<FactId> = per_action.into_iter().flatten().collect();
            if !(2..=4).contains(&union.len()) || union.iter().any(|f| seen.contains(f)) {
                continue;
            }
            let d: Vec<FactId> = union.into_iter().collect();
            if !seen_disj.contains(&d) && ex.verified(&d) {
                seen_disj.insert(d.clone());
                out.disjunctive.push(d);
            }
        }
    }
    out
}
