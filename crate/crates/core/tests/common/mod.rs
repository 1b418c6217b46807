#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::fmt::Write;

use lprpg_core::analysis::Analysis;
use lprpg_core::config::HeuristicConfig;
use lprpg_core::heuristic::Evaluator;
use lprpg_core::lpmodel::{FlowContext, FlowModel, GoalRows};
use lprpg_core::num::Interval;
use lprpg_core::rpg::unlimited_bounds;
use lprpg_core::model::{load, ActionId, GroundTask, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_task(name: &str) -> GroundTask {
    let f = lprpg_core::domains::fixture(name).unwrap();
    load(&f.domain, &f.problem).unwrap()
}

/// Small random producer-consumer task over 3 facts and 2 counters.
pub fn micro_task_text(seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let facts = ["p0", "p1", "p2"];
    let vars = ["r0", "r1"];
    let mut dom = String::from(
        "(define (domain micro)\n  (:requirements :strips :numeric-fluents)\n  (:predicates (p0) (p1) (p2))\n  (:functions (r0) (r1))\n",
    );
    let n = rng.gen_range(3..=5);
    for i in 0..n {
        let mut pre = Vec::new();
        let mut eff = Vec::new();
        for f in facts {
            if rng.gen_bool(0.3) {
                pre.push(format!("({f})"));
            }
        }
        if rng.gen_bool(0.5) {
            let v = vars[rng.gen_range(0..2)];
            pre.push(format!("(>= ({v}) {})", rng.gen_range(1..=2)));
        }
        let add = if rng.gen_bool(0.6) { Some(rng.gen_range(0..3)) } else { None };
        if let Some(a) = add {
            eff.push(format!("({})", facts[a]));
        }
        if rng.gen_bool(0.3) {
            let d = rng.gen_range(0..3);
            if Some(d) != add {
                eff.push(format!("(not ({}))", facts[d]));
            }
        }
        for v in vars {
            if rng.gen_bool(0.5) {
                let op = if rng.gen_bool(0.5) { "increase" } else { "decrease" };
                eff.push(format!("({op} ({v}) {})", rng.gen_range(1..=2)));
            }
        }
        if eff.is_empty() {
            eff.push(format!("(increase ({}) 1)", vars[i % 2]));
        }
        let _ = writeln!(
            dom,
            "  (:action a{i} :parameters () :precondition (and {}) :effect (and {}))",
            pre.join(" "),
            eff.join(" ")
        );
    }
    dom.push_str(")\n");
    let mut init = Vec::new();
    for f in facts {
        if rng.gen_bool(0.4) {
            init.push(format!("({f})"));
        }
    }
    for v in vars {
        init.push(format!("(= ({v}) {})", rng.gen_range(0..=2)));
    }
    let mut goal = Vec::new();
    if rng.gen_bool(0.7) {
        goal.push(format!("({})", facts[rng.gen_range(0..3)]));
    }
    if goal.is_empty() || rng.gen_bool(0.5) {
        goal.push(format!("(>= ({}) {})", vars[rng.gen_range(0..2)], rng.gen_range(1..=4)));
    }
    let prob = format!(
        "(define (problem micro-{seed}) (:domain micro)\n  (:init {})\n  (:goal (and {})))\n",
        init.join(" "),
        goal.join(" ")
    );
    (dom, prob)
}

pub fn micro_task(seed: u64) -> GroundTask {
    let (d, p) = micro_task_text(seed);
    load(&d, &p).unwrap_or_else(|e| panic!("micro task {seed}: {e}\n{d}\n{p}"))
}

/// Shortest plan length up to `depth`, by breadth-first search over exact states.
pub fn bfs_optimal(task: &GroundTask, depth: usize) -> Option<usize> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::from([(task.init.clone(), 0usize)]);
    seen.insert(task.init.clone());
    while let Some((s, d)) = queue.pop_front() {
        if task.is_goal(&s) {
            return Some(d);
        }
        if d == depth {
            continue;
        }
        for a in &task.actions {
            if a.is_applicable(&s) {
                let t = task.apply_unchecked(&s, a);
                if seen.insert(t.clone()) {
                    queue.push_back((t, d + 1));
                }
            }
        }
    }
    None
}

/// Whether the reachable state space is finite within `limit` states and contains no goal.
pub fn exhaustively_unsolvable(task: &GroundTask, limit: usize) -> Option<bool> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut stack = vec![task.init.clone()];
    seen.insert(task.init.clone());
    while let Some(s) = stack.pop() {
        if task.is_goal(&s) {
            return Some(false);
        }
        for a in &task.actions {
            if a.is_applicable(&s) {
                let t = task.apply_unchecked(&s, a);
                if seen.insert(t.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    stack.push(t);
                }
            }
        }
    }
    Some(true)
}

/// Every goal-reaching action sequence of length at most `depth`, up to `limit` of them.
pub fn valid_plans(task: &GroundTask, depth: usize, limit: usize) -> Vec<Vec<ActionId>> {
    fn go(task: &GroundTask, s: &State, depth: usize, path: &mut Vec<ActionId>, out: &mut Vec<Vec<ActionId>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if task.is_goal(s) {
            out.push(path.clone());
        }
        if path.len() == depth {
            return;
        }
        for a in &task.actions {
            if a.is_applicable(s) {
                path.push(a.id);
                go(task, &task.apply_unchecked(s, a), depth, path, out, limit);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(task, &task.init, depth, &mut Vec::new(), &mut out, limit);
    out
}

/// Layer-bound containment check of the flow-model graph against the
/// unlimited-applications interval fixpoint. Returns `(states, violations)`.
pub fn bound_dominance(an: &Analysis, states: &[State]) -> (usize, Vec<String>) {
    let ev = Evaluator::new(an, HeuristicConfig::default());
    let mut bad = Vec::new();
    for s in states {
        let lm = ev.initial_landmarks(s);
        let g = ev.graph(s, &lm);
        let start: Vec<Interval> = s.values.iter().map(|&x| Interval::point(x)).collect();
        let mut acts = Vec::new();
        for i in 1..g.bounds.len() {
            acts.extend(g.layers[i].iter().copied());
            let outer = unlimited_bounds(&an.task, &start, &acts);
            for (v, (inner, outer)) in g.bounds[i].iter().zip(&outer).enumerate() {
                if inner.lo < outer.lo || inner.hi > outer.hi {
                    bad.push(format!("{}: layer {i} {} {} not inside {}", an.task.name, an.task.vars[v], inner, outer));
                }
            }
        }
    }
    (states.len(), bad)
}

/// States met on a seeded random walk from the initial state.
pub fn random_walk(task: &GroundTask, seed: u64, len: usize) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = task.init.clone();
    let mut out = vec![s.clone()];
    for _ in 0..len {
        let app = task.applicable(&s);
        if app.is_empty() {
            break;
        }
        let a = app[rng.gen_range(0..app.len())];
        s = task.apply_unchecked(&s, &task.actions[a]);
        out.push(s.clone());
    }
    out
}

#[derive(Debug, Default)]
pub struct SoundnessReport {
    pub tasks: usize,
    pub plans: usize,
    pub infeasible_roots: usize,
    pub counterexamples: Vec<String>,
}

/// Checks plan count vectors against the root flow model with every action and
/// goal row loaded, and infeasible roots against exhaustive search.
pub fn relaxation_soundness(seeds: impl IntoIterator<Item = u64>, wanted: usize) -> SoundnessReport {
    let mut rep = SoundnessReport::default();
    for seed in seeds {
        if rep.tasks >= wanted {
            break;
        }
        let raw = micro_task(seed);
        let an = Analysis::new(&raw);
        if !an.classification.is_conforming() {
            continue;
        }
        rep.tasks += 1;
        let task = &an.task;
        let ctx = FlowContext::new(task, &an.classification, 1e6);
        let achieved = vec![false; an.landmarks.len()];
        let rows = GoalRows::from_config(&HeuristicConfig::default(), &an.landmarks, &achieved);
        let mut m = FlowModel::build(&ctx, &task.init.values, &task.init.facts, 0..task.actions.len());
        m.add_goal_rows(&rows);
        if !m.is_feasible() {
            rep.infeasible_roots += 1;
            match exhaustively_unsolvable(task, 20_000) {
                Some(true) => {}
                Some(false) => rep.counterexamples.push(format!("seed {seed}: infeasible root but solvable")),
                None => {
                    if let Some(d) = bfs_optimal(task, 8) {
                        rep.counterexamples.push(format!("seed {seed}: infeasible root but a {d}-step plan exists"));
                    }
                }
            }
            continue;
        }
        for plan in valid_plans(task, 5, 100) {
            rep.plans += 1;
            let mut counts: Vec<(ActionId, u64)> = Vec::new();
            for &a in &plan {
                match counts.iter_mut().find(|(b, _)| *b == a) {
                    Some((_, n)) => *n += 1,
                    None => counts.push((a, 1)),
                }
            }
            if !m.admits_counts(&counts) {
                rep.counterexamples.push(format!("seed {seed}: plan {plan:?} rejected"));
            }
        }
    }
    rep
}
