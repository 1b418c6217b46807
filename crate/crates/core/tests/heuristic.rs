mod common;

use common::{fixture_task, micro_task, random_walk};
use lprpg_core::analysis::Analysis;
use lprpg_core::config::{HeuristicConfig, HeuristicMode, WeightScheme};
use lprpg_core::extract::HeuristicResult;
use lprpg_core::heuristic::Evaluator;
use lprpg_core::lpmodel::action_weight;
use lprpg_core::model::State;
use lprpg_core::num::Q;
use lprpg_core::rpg::{sapa_penalty, Penalty};
use proptest::prelude::*;

fn eval(an: &Analysis, cfg: HeuristicConfig, s: &State) -> HeuristicResult {
    let ev = Evaluator::new(an, cfg);
    let lm = ev.initial_landmarks(s);
    ev.evaluate(s, &lm)
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

#[test]
fn resource_persistence_across_modes() {
    let an = Analysis::new(&fixture_task("resource-persistence"));
    let init = an.task.init.clone();
    let saw = an.task.action_by_name("(saw)").unwrap().id;

    let ff = eval(&an, HeuristicConfig::metricff(), &init);
    assert_eq!(ff.h, 2.0);
    assert!(ff.trace.iter().all(|t| t.action != saw));

    let sapa = eval(&an, HeuristicConfig::with_mode(HeuristicMode::MetricFfSapa), &init);
    assert_eq!(sapa.h, 3.0);

    let lp = eval(&an, HeuristicConfig::default(), &init);
    assert!(lp.trace.iter().any(|t| t.action == saw && t.count >= 1.0));
}

#[test]
fn sapa_penalty_rounds_up_and_detects_missing_producer() {
    assert_eq!(sapa_penalty(q(5), q(1), q(1), Some(q(2))), Penalty::Value(2));
    assert_eq!(sapa_penalty(q(2), q(0), q(3), Some(q(2))), Penalty::Value(0));
    assert_eq!(sapa_penalty(q(2), q(0), q(1), None), Penalty::DeadEnd);
}

#[test]
fn sapa_goal_states_below_zero_are_not_dead() {
    let an = Analysis::new(&micro_task(4063));
    let ev = Evaluator::new(&an, HeuristicConfig::with_mode(HeuristicMode::MetricFfSapa));
    for s in random_walk(&an.task, 0, 6) {
        assert!(an.task.is_goal(&s));
        assert_eq!(ev.evaluate(&s, &ev.initial_landmarks(&s)).h, 0.0, "{s:?}");
    }
}

#[test]
fn objective_weights() {
    let k3 = HeuristicConfig::default();
    assert_eq!(action_weight(&k3, 2, 0.0), 9.0);
    let hadd = HeuristicConfig {
        weight: WeightScheme::HAdd,
        ..HeuristicConfig::default()
    };
    assert_eq!(action_weight(&hadd, 4, 5.0), 6.0);
}

#[test]
fn crt_relaxed_plan_loads_and_unloads() {
    let an = Analysis::new(&fixture_task("crt"));
    let r = eval(&an, HeuristicConfig::metricff(), &an.task.init);
    let names: Vec<&str> = r.trace.iter().map(|t| an.task.actions[t.action].name.as_str()).collect();
    assert_eq!(r.h, 2.0);
    assert!(names.iter().any(|n| n.starts_with("(load")), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("(unload")), "{names:?}");
}

#[test]
fn lprpg_ff_reaches_goals_on_unlimited_graph() {
    let an = Analysis::new(&fixture_task("crt-cabin"));
    let r = eval(&an, HeuristicConfig::with_mode(HeuristicMode::LpRpgFf), &an.task.init);
    assert!(r.h.is_finite() && r.h > 0.0);
}

#[test]
fn non_conforming_task_falls_back() {
    let d = "(define (domain nc) (:requirements :numeric-fluents)
      (:functions (x) (y))
      (:action grow :parameters () :precondition () :effect (increase (x) (y)))
      (:action tick :parameters () :precondition () :effect (increase (y) 1)))";
    let p = "(define (problem nc1) (:domain nc) (:init (= (x) 0) (= (y) 0)) (:goal (>= (x) 3)))";
    let task = lprpg_core::model::load(d, p).unwrap();
    let an = Analysis::new(&task);
    let ev = Evaluator::new(&an, HeuristicConfig::default());
    assert_eq!(ev.mode(), HeuristicMode::MetricFf);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn accounting_and_helpful_invariants(seed in 0u64..5000, walk in 0u64..50, mode in 0usize..4) {
        let task = micro_task(seed);
        let an = Analysis::new(&task);
        let cfg = HeuristicConfig::with_mode(
            [HeuristicMode::LpRpg, HeuristicMode::MetricFf, HeuristicMode::MetricFfSapa, HeuristicMode::LpRpgFf][mode],
        );
        let ev = Evaluator::new(&an, cfg);
        for s in random_walk(&an.task, walk, 6) {
            let lm = ev.initial_landmarks(&s);
            let r = ev.evaluate(&s, &lm);
            let goal = an.task.is_goal(&s);
            prop_assert_eq!(r.h == 0.0, goal);
            if r.is_dead_end() {
                continue;
            }
            prop_assert!(r.h >= 0.0);
            for t in &r.trace {
                prop_assert!(t.count > 0.0);
            }
            if ev.mode() != HeuristicMode::MetricFfSapa && !goal && r.traced_h() > 0.0 {
                prop_assert!((r.h - r.traced_h()).abs() < 1e-6 * r.h.max(1.0), "h {} traced {}", r.h, r.traced_h());
            }
            let app = an.task.applicable(&s);
            for a in &r.helpful {
                prop_assert!(app.contains(a));
            }
        }
    }

    #[test]
    fn interval_dead_end_implies_flow_dead_end(seed in 0u64..5000, walk in 0u64..50) {
        let task = micro_task(seed);
        let an = Analysis::new(&task);
        for s in random_walk(&an.task, walk, 6) {
            let ff = eval(&an, HeuristicConfig::metricff(), &s);
            let lp = eval(&an, HeuristicConfig::default(), &s);
            if ff.is_dead_end() {
                prop_assert!(lp.is_dead_end());
            }
        }
    }
}
