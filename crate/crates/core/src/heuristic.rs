//! State evaluation: graph expansion followed by relaxed plan extraction.

use crate::analysis::{Analysis, Classification, LandmarkSet};
use crate::config::{HeuristicConfig, HeuristicMode};
use crate::extract::{extract_lprpg, extract_metricff, HeuristicResult, LpExtractArgs};
use crate::lpmodel::{FlowContext, GoalRows, LpStats};
use crate::model::{ActionId, GroundTask, State};
use crate::rpg::{expand, plan_penalty, ConditionIndex, ExpandArgs, Penalty, RpGraph, RpgMode, RpgStatus};

/// Evaluates states of one task under one configuration. Shareable across threads.
pub struct Evaluator<'a> {
    pub task: &'a GroundTask,
    pub cls: &'a Classification,
    pub landmarks: &'a LandmarkSet,
    pub cfg: HeuristicConfig,
    ctx: FlowContext<'a>,
    conds: ConditionIndex,
    goal_achievers: Vec<ActionId>,
    mode: HeuristicMode,
}

impl<'a> Evaluator<'a> {
    pub fn new(analysis: &'a Analysis, cfg: HeuristicConfig) -> Self {
        Self::from_parts(&analysis.task, &analysis.classification, &analysis.landmarks, cfg)
    }

    pub fn from_parts(task: &'a GroundTask, cls: &'a Classification, landmarks: &'a LandmarkSet, cfg: HeuristicConfig) -> Self {
        let mut mode = cfg.mode;
        if mode.uses_lp() && !cls.is_conforming() {
            let why: Vec<String> = cls
                .violations()
                .iter()
                .map(|(v, w)| format!("{}: {w}", task.vars[*v]))
                .collect();
            log::warn!(
                "task is not producer-consumer conforming ({}); using metricff instead",
                why.join("; ")
            );
            mode = HeuristicMode::MetricFf;
        }
        let ctx = FlowContext::new(task, cls, cfg.count_cap);
        let mut goal_achievers: Vec<ActionId> = task
            .goal_facts
            .iter()
            .chain(&landmarks.conjunctive)
            .chain(landmarks.disjunctive.iter().flatten())
            .flat_map(|&f| ctx.adders[f].iter().copied())
            .collect();
        goal_achievers.sort_unstable();
        goal_achievers.dedup();
        Evaluator {
            task,
            cls,
            landmarks,
            cfg,
            ctx,
            conds: ConditionIndex::new(task),
            goal_achievers,
            mode,
        }
    }

    /// The mode actually used, after any fallback.
    pub fn mode(&self) -> HeuristicMode {
        self.mode
    }

    pub fn context(&self) -> &FlowContext<'a> {
        &self.ctx
    }

    fn rpg_mode(&self) -> RpgMode {
        match self.mode {
            HeuristicMode::LpRpg => RpgMode::Lp,
            HeuristicMode::LpRpgFf => RpgMode::Unlimited,
            _ => RpgMode::MetricFf,
        }
    }

    /// Expands the graph for `state`. `achieved` flags landmarks already reached on the path.
    pub fn graph(&self, state: &State, achieved: &[bool]) -> RpGraph<'_, 'a> {
        let lp = self.mode.uses_lp();
        let rows = GoalRows::from_config(&self.cfg, self.landmarks, achieved);
        let args = ExpandArgs {
            mode: self.rpg_mode(),
            layer_cap: self.cfg.layer_cap,
            goal_rows: lp.then_some(rows),
            with_model: lp,
        };
        expand(&self.ctx, &self.conds, state, &args)
    }

    pub fn evaluate(&self, state: &State, achieved: &[bool]) -> HeuristicResult {
        if self.mode == HeuristicMode::Blind {
            let goal = self.task.is_goal(state);
            return HeuristicResult {
                h: if goal { 0.0 } else { 1.0 },
                helpful: self.task.applicable(state),
                trace: Vec::new(),
                lp: LpStats::default(),
                layers: 0,
            };
        }
        let mut g = self.graph(state, achieved);
        self.extract(&mut g, state, achieved)
    }

    pub fn extract(&self, g: &mut RpGraph<'_, 'a>, state: &State, achieved: &[bool]) -> HeuristicResult {
        if g.status == RpgStatus::RelaxedUnsolvable {
            let lp = g.model.as_ref().map(|m| m.stats).unwrap_or_default();
            return HeuristicResult::dead_end(g.final_layer(), lp);
        }
        match self.mode {
            HeuristicMode::LpRpg | HeuristicMode::LpRpgFf => {
                let args = LpExtractArgs {
                    cfg: &self.cfg,
                    goal_rows: GoalRows::from_config(&self.cfg, self.landmarks, achieved),
                    goal_achievers: &self.goal_achievers,
                };
                match extract_lprpg(g, self.task, state, &args) {
                    Some(r) => r,
                    None => {
                        log::warn!("flow model solve budget exhausted; using interval extraction");
                        extract_metricff(g, self.task, state)
                    }
                }
            }
            HeuristicMode::MetricFfSapa => {
                let mut r = extract_metricff(g, self.task, state);
                match plan_penalty(self.cls, state, &r.plan_counts()) {
                    Penalty::Value(p) => r.h += p as f64,
                    Penalty::DeadEnd => r.h = f64::INFINITY,
                }
                r
            }
            _ => extract_metricff(g, self.task, state),
        }
    }

    /// Landmark flags for `state` given its parent's flags. Goal facts false in `state` are unachieved.
    pub fn progress_landmarks(&self, parent: &[bool], state: &State) -> Vec<bool> {
        let mut out = parent.to_vec();
        for i in self.landmarks.satisfied_by(&state.facts) {
            out[i] = true;
        }
        for (i, f) in self.landmarks.conjunctive.iter().enumerate() {
            if !state.facts.contains(*f) && self.task.goal_facts.contains(f) {
                out[i] = false;
            }
        }
        out
    }

    pub fn initial_landmarks(&self, state: &State) -> Vec<bool> {
        self.progress_landmarks(&vec![false; self.landmarks.len()], state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::WeightScheme;
    use crate::domains::fixture;
    use crate::model::load;

    fn analysis(name: &str) -> Analysis {
        let f = fixture(name).unwrap();
        Analysis::new(&load(&f.domain, &f.problem).unwrap())
    }

    fn h(an: &Analysis, cfg: HeuristicConfig) -> HeuristicResult {
        let ev = Evaluator::new(an, cfg);
        let s = an.task.init.clone();
        let lm = ev.initial_landmarks(&s);
        ev.evaluate(&s, &lm)
    }

    #[test]
    fn crt_intervals_count_two_steps() {
        let an = analysis("crt");
        let r = h(&an, HeuristicConfig::metricff());
        assert_eq!(r.h, 2.0);
    }

    #[test]
    fn crt_without_producer_is_dead_for_flow_model() {
        let an = analysis("crt");
        assert!(h(&an, HeuristicConfig::default()).is_dead_end());
        let an = analysis("crt-cabin");
        let r = h(&an, HeuristicConfig::default());
        assert!(!r.is_dead_end());
        let fell = an.task.action_by_name("(fell p1)").unwrap().id;
        assert!(r.trace.iter().any(|t| t.action == fell));
    }

    #[test]
    fn five_cart_helpful_has_one_load() {
        let an = analysis("five-cart");
        let cfg = HeuristicConfig {
            weight: WeightScheme::Layer(1.0),
            ..HeuristicConfig::default()
        };
        let r = h(&an, cfg);
        assert_eq!(r.h, 3.0);
        let loads = r
            .helpful
            .iter()
            .filter(|&&a| an.task.actions[a].name.starts_with("(load"))
            .count();
        assert_eq!(loads, 1);
    }

    #[test]
    fn pump_threshold_out_of_reach() {
        let an = analysis("pump-unsolvable");
        assert!(h(&an, HeuristicConfig::default()).is_dead_end());
        assert!(!h(&an, HeuristicConfig::metricff()).is_dead_end());
        assert!(!h(&analysis("pump-solvable"), HeuristicConfig::default()).is_dead_end());
    }

    #[test]
    fn goal_state_scores_zero() {
        let an = analysis("empty-goal");
        assert_eq!(h(&an, HeuristicConfig::default()).h, 0.0);
    }
}
