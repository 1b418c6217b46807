//! Enforced hill-climbing with a weighted A* fallback.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use crate::heuristic::Evaluator;
use crate::lpmodel::LpStats;
use crate::model::{ActionId, ApplyError, GroundTask, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Parallel only when compiled with the `parallel` feature.
    pub fn effective(self) -> Execution {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub wastar_weight: f64,
    pub ehc: bool,
    pub wastar: bool,
    pub max_expansions: u64,
    pub time_limit: Duration,
    pub ehc_depth: usize,
    pub execution: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            wastar_weight: 5.0,
            ehc: true,
            wastar: true,
            max_expansions: 1_000_000,
            time_limit: Duration::from_secs(1800),
            ehc_depth: 20,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Plan {
    pub actions: Vec<ActionId>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// One `step: (action args)` line per action.
    pub fn format(&self, task: &GroundTask) -> String {
        self.actions
            .iter()
            .enumerate()
            .map(|(i, &a)| format!("{i}: {}\n", task.actions[a].name))
            .collect()
    }

    /// Inverse of [`Plan::format`].
    pub fn parse(task: &GroundTask, text: &str) -> Result<Plan, String> {
        let mut actions = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let name = match line.split_once(':') {
                Some((_, rest)) => rest.trim(),
                None => line,
            };
            let a = task
                .action_by_name(name)
                .ok_or_else(|| format!("line {}: unknown action {name}", n + 1))?;
            actions.push(a.id);
        }
        Ok(Plan { actions })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationError {
    Inapplicable { step: usize, condition: String },
    GoalNotReached { condition: String },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::Inapplicable { step, condition } => {
                write!(f, "step {step}: precondition {condition} does not hold")
            }
            ValidationError::GoalNotReached { condition } => write!(f, "goal {condition} does not hold"),
        }
    }
}

/// Replays `plan` from the initial state and returns the final state.
pub fn validate(task: &GroundTask, plan: &Plan) -> Result<State, ValidationError> {
    let mut s = task.init.clone();
    for (step, &a) in plan.actions.iter().enumerate() {
        let act = &task.actions[a];
        s = match task.apply(&s, act) {
            Ok(next) => next,
            Err(ApplyError::MissingFact(f)) => {
                return Err(ValidationError::Inapplicable {
                    step,
                    condition: task.facts[f].clone(),
                })
            }
            Err(ApplyError::NumericFailed(i)) => {
                return Err(ValidationError::Inapplicable {
                    step,
                    condition: task.format_condition(&act.num_pre[i]),
                })
            }
        };
    }
    if let Some(&f) = task.goal_facts.iter().find(|&&f| !s.facts.contains(f)) {
        return Err(ValidationError::GoalNotReached {
            condition: task.facts[f].clone(),
        });
    }
    if let Some(c) = task.goal_num.iter().find(|c| !c.holds(&s.values)) {
        return Err(ValidationError::GoalNotReached {
            condition: task.format_condition(c),
        });
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    /// Both phases ran out of states.
    Exhausted,
    /// The initial state has no relaxed solution.
    RootDeadEnd,
    ExpansionLimit,
    TimeLimit,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub expanded: u64,
    pub evaluated: u64,
    pub lp: LpStats,
    pub initial_h: f64,
    pub ehc_solved: bool,
    pub search_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub plan: Option<Plan>,
    pub stats: SearchStats,
}

#[derive(Clone)]
struct Node {
    state: State,
    landmarks: Vec<bool>,
    h: f64,
    helpful: Vec<ActionId>,
    parent: Option<usize>,
    action: Option<ActionId>,
    g: usize,
}

type Key = (State, Vec<bool>);

struct Searcher<'e, 'a> {
    ev: &'e Evaluator<'a>,
    cfg: &'e SearchConfig,
    nodes: Vec<Node>,
    stats: SearchStats,
    start: Instant,
}

impl<'e, 'a> Searcher<'e, 'a> {
    fn key(&self, n: usize) -> Key {
        (self.nodes[n].state.clone(), self.nodes[n].landmarks.clone())
    }

    fn expand_check(&mut self) -> Result<(), Outcome> {
        if self.stats.expanded >= self.cfg.max_expansions {
            return Err(Outcome::ExpansionLimit);
        }
        if self.start.elapsed() >= self.cfg.time_limit {
            return Err(Outcome::TimeLimit);
        }
        self.stats.expanded += 1;
        Ok(())
    }

    /// Evaluates the successors of `parent` under `actions`, returning new node indices.
    fn successors(&mut self, parent: usize, actions: &[ActionId]) -> Vec<usize> {
        let task = self.ev.task;
        let p = &self.nodes[parent];
        let children: Vec<(ActionId, State, Vec<bool>)> = actions
            .iter()
            .filter(|&&a| task.actions[a].is_applicable(&p.state))
            .map(|&a| {
                let s = task.apply_unchecked(&p.state, &task.actions[a]);
                let lm = self.ev.progress_landmarks(&p.landmarks, &s);
                (a, s, lm)
            })
            .collect();
        let g = p.g + 1;
        let results = evaluate_all(self.ev, &children, self.cfg.execution.effective());
        let mut out = Vec::with_capacity(children.len());
        for ((a, state, landmarks), r) in children.into_iter().zip(results) {
            self.stats.evaluated += 1;
            self.stats.lp.absorb(&r.lp);
            self.nodes.push(Node {
                state,
                landmarks,
                h: r.h,
                helpful: r.helpful,
                parent: Some(parent),
                action: Some(a),
                g,
            });
            out.push(self.nodes.len() - 1);
        }
        out
    }

    fn plan_to(&self, mut n: usize) -> Plan {
        let mut actions = Vec::new();
        while let Some(a) = self.nodes[n].action {
            actions.push(a);
            n = self.nodes[n].parent.unwrap();
        }
        actions.reverse();
        Plan { actions }
    }

    fn is_goal(&self, n: usize) -> bool {
        self.ev.task.is_goal(&self.nodes[n].state)
    }

    fn ehc(&mut self, root: usize) -> Result<Option<usize>, Outcome> {
        let mut best = root;
        loop {
            if self.is_goal(best) {
                return Ok(Some(best));
            }
            let next = match self.plateau(best, true)? {
                Some(n) => Some(n),
                None => self.plateau(best, false)?,
            };
            match next {
                Some(n) => best = n,
                None => return Ok(None),
            }
        }
    }

    /// Breadth-first search from `from` until a strictly better or goal state appears.
    fn plateau(&mut self, from: usize, helpful_only: bool) -> Result<Option<usize>, Outcome> {
        let bound = self.nodes[from].h;
        let all: Vec<ActionId> = (0..self.ev.task.actions.len()).collect();
        let mut closed: HashSet<Key> = HashSet::new();
        closed.insert(self.key(from));
        let mut queue = VecDeque::from([(from, 0usize)]);
        while let Some((n, depth)) = queue.pop_front() {
            if depth >= self.cfg.ehc_depth {
                continue;
            }
            self.expand_check()?;
            let actions = if helpful_only {
                self.nodes[n].helpful.clone()
            } else {
                all.clone()
            };
            for c in self.successors(n, &actions) {
                if self.is_goal(c) || self.nodes[c].h < bound {
                    return Ok(Some(c));
                }
                if self.nodes[c].h.is_infinite() || !closed.insert(self.key(c)) {
                    continue;
                }
                queue.push_back((c, depth + 1));
            }
        }
        Ok(None)
    }

    fn wastar(&mut self, root: usize) -> Result<Option<usize>, Outcome> {
        let w = self.cfg.wastar_weight;
        let all: Vec<ActionId> = (0..self.ev.task.actions.len()).collect();
        let mut best_g: HashMap<Key, usize> = HashMap::new();
        let mut open = BinaryHeap::new();
        let mut seq = 0u64;
        best_g.insert(self.key(root), 0);
        open.push(Entry::new(&self.nodes[root], w, root, seq));
        while let Some(e) = open.pop() {
            let n = e.node;
            if best_g.get(&self.key(n)).is_some_and(|&g| g < self.nodes[n].g) {
                continue;
            }
            if self.is_goal(n) {
                return Ok(Some(n));
            }
            self.expand_check()?;
            for c in self.successors(n, &all) {
                if self.nodes[c].h.is_infinite() {
                    continue;
                }
                let g = self.nodes[c].g;
                let k = self.key(c);
                if best_g.get(&k).is_some_and(|&old| old <= g) {
                    continue;
                }
                best_g.insert(k, g);
                seq += 1;
                open.push(Entry::new(&self.nodes[c], w, c, seq));
            }
        }
        Ok(None)
    }
}

fn evaluate_all(
    ev: &Evaluator,
    children: &[(ActionId, State, Vec<bool>)],
    exec: Execution,
) -> Vec<crate::extract::HeuristicResult> {
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel && children.len() > 1 {
        use rayon::prelude::*;
        return children.par_iter().map(|(_, s, lm)| ev.evaluate(s, lm)).collect();
    }
    let _ = exec;
    children.iter().map(|(_, s, lm)| ev.evaluate(s, lm)).collect()
}

struct Entry {
    f: f64,
    h: f64,
    seq: u64,
    node: usize,
}

impl Entry {
    fn new(n: &Node, w: f64, node: usize, seq: u64) -> Self {
        Entry {
            f: n.g as f64 + w * n.h,
            h: n.h,
            seq,
            node,
        }
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(other.h.total_cmp(&self.h))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Runs hill-climbing and then weighted A* from the initial state, each unless disabled.
pub fn search(ev: &Evaluator, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let task = ev.task;
    let init = task.init.clone();
    let landmarks = ev.initial_landmarks(&init);
    let r = ev.evaluate(&init, &landmarks);
    let mut s = Searcher {
        ev,
        cfg,
        nodes: Vec::new(),
        stats: SearchStats {
            evaluated: 1,
            lp: r.lp,
            initial_h: r.h,
            ..SearchStats::default()
        },
        start,
    };
    s.nodes.push(Node {
        state: init,
        landmarks,
        h: r.h,
        helpful: r.helpful,
        parent: None,
        action: None,
        g: 0,
    });
    let finish = |mut s: Searcher, outcome: Outcome, goal: Option<usize>| {
        s.stats.search_time = s.start.elapsed();
        SearchResult {
            outcome,
            plan: goal.map(|n| s.plan_to(n)),
            stats: s.stats,
        }
    };
    if s.is_goal(0) {
        return finish(s, Outcome::Solved, Some(0));
    }
    if r.h.is_infinite() {
        return finish(s, Outcome::RootDeadEnd, None);
    }
    if cfg.ehc {
        match s.ehc(0) {
            Ok(Some(n)) => {
                s.stats.ehc_solved = true;
                return finish(s, Outcome::Solved, Some(n));
            }
            Ok(None) => log::info!("hill-climbing failed after {} expansions; switching to weighted A*", s.stats.expanded),
            Err(o) => return finish(s, o, None),
        }
    }
    if !cfg.wastar {
        return finish(s, Outcome::Exhausted, None);
    }
    match s.wastar(0) {
        Ok(Some(n)) => finish(s, Outcome::Solved, Some(n)),
        Ok(None) => finish(s, Outcome::Exhausted, None),
        Err(o) => finish(s, o, None),
    }
}
