mod common;

use common::{bound_dominance, fixture_task, random_walk, relaxation_soundness};
use lprpg_core::analysis::Analysis;
use lprpg_core::config::{HeuristicConfig, HeuristicMode, IntegralityPolicy, WeightScheme};
use lprpg_core::heuristic::Evaluator;
use lprpg_core::lpmodel::{FlowContext, FlowModel};
use lprpg_core::num::{ExtQ, Interval, Q};
use lprpg_core::rpg::RpgStatus;
use mpsolver::SolveStatus;

fn iv(lo: i64, hi: i64) -> Interval {
    Interval {
        lo: ExtQ::Fin(Q::from_integer(lo)),
        hi: ExtQ::Fin(Q::from_integer(hi)),
    }
}

fn two_layer_bounds(mode: HeuristicMode) -> Vec<Interval> {
    let an = Analysis::new(&fixture_task("tandem"));
    let ev = Evaluator::new(&an, HeuristicConfig::with_mode(mode));
    let s = an.task.init.clone();
    let lm = ev.initial_landmarks(&s);
    let g = ev.graph(&s, &lm);
    assert!(g.bounds.len() > 2);
    g.bounds[2].clone()
}

#[test]
fn tandem_flow_bounds_after_two_layers() {
    assert_eq!(two_layer_bounds(HeuristicMode::LpRpg), vec![iv(0, 2), iv(0, 2)]);
}

#[test]
fn tandem_interval_bounds_after_two_layers() {
    assert_eq!(two_layer_bounds(HeuristicMode::MetricFf), vec![iv(0, 4), iv(-2, 2)]);
}

#[test]
fn tandem_flow_graph_stalls_short_of_goal() {
    let an = Analysis::new(&fixture_task("tandem"));
    let ev = Evaluator::new(&an, HeuristicConfig::default());
    let s = an.task.init.clone();
    let g = ev.graph(&s, &ev.initial_landmarks(&s));
    assert_eq!(g.status, RpgStatus::RelaxedUnsolvable);
}

#[test]
fn empty_cover_row_is_infeasible() {
    let an = Analysis::new(&fixture_task("corridor"));
    let ctx = FlowContext::new(&an.task, &an.classification, 1e6);
    let mut m = FlowModel::build(&ctx, &an.task.init.values, &an.task.init.facts, 0..an.task.actions.len());
    assert!(m.is_feasible());
    m.push();
    m.add_cover("nothing", []);
    assert!(!m.is_feasible());
    m.pop();
    assert!(m.is_feasible());
}

fn five_cart(ints: IntegralityPolicy) -> (f64, usize) {
    let an = Analysis::new(&fixture_task("five-cart"));
    let cfg = HeuristicConfig {
        weight: WeightScheme::Layer(1.0),
        ints,
        ..HeuristicConfig::default()
    };
    let ev = Evaluator::new(&an, cfg.clone());
    let s = an.task.init.clone();
    let lm = ev.initial_landmarks(&s);
    let mut g = ev.graph(&s, &lm);
    let first = g.action_first.clone();
    let m = g.model.as_mut().unwrap();
    m.push();
    let numeric: Vec<_> = an.task.goal_num.clone();
    for c in &numeric {
        m.add_condition(c);
    }
    m.set_weights(&|_| 1.0);
    let sets = lprpg_core::lpmodel::IntegralitySets::new(&an.task, (0..first.len()).filter(|&a| first[a] == 1), []);
    m.apply_integrality(ints, &sets);
    let sol = m.solve(mpsolver::Integrality::Respect);
    m.pop();
    assert_eq!(sol.status, SolveStatus::Optimal);
    let r = ev.extract(&mut g, &s, &lm);
    let loads = r.helpful.iter().filter(|&&a| an.task.actions[a].name.starts_with("(load")).count();
    (sol.objective, loads)
}

#[test]
fn five_cart_first_layer_integrality() {
    let (obj, loads) = five_cart(IntegralityPolicy::FirstLayer);
    assert!((obj - 2.0).abs() < 1e-9);
    assert_eq!(loads, 1);
}

#[test]
fn five_cart_minimal_integrality() {
    let (obj, loads) = five_cart(IntegralityPolicy::Minimal);
    assert!((obj - 2.0).abs() < 1e-9);
    assert!((1..=5).contains(&loads));
}

#[test]
fn flow_bounds_inside_unlimited_intervals() {
    let mut states = 0;
    for name in ["tandem", "crt", "crt-cabin", "five-cart", "helpful-distortion", "resource-persistence", "build-cart", "pump-solvable"] {
        let an = Analysis::new(&fixture_task(name));
        let walk = random_walk(&an.task, 3, 10);
        let (n, bad) = bound_dominance(&an, &walk);
        states += n;
        assert!(bad.is_empty(), "{bad:?}");
    }
    assert!(states > 30);
}

#[test]
fn plans_fit_the_root_flow_model() {
    let rep = relaxation_soundness(0..2000, 20);
    assert_eq!(rep.tasks, 20);
    assert!(rep.counterexamples.is_empty(), "{:?}", rep.counterexamples);
}
