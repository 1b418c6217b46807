//! Bundled micro-domains and seeded instance generators.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub domain: String,
    pub problem: String,
}

pub const FIXTURES: &[&str] = &[
    "tandem",
    "crt",
    "crt-cabin",
    "five-cart",
    "helpful-distortion",
    "resource-persistence",
    "corridor",
    "package",
    "build-cart",
    "pump-unsolvable",
    "pump-solvable",
    "empty-goal",
];

const TANDEM_DOMAIN: &str = "
(define (domain tandem)
  (:requirements :strips :numeric-fluents)
  (:predicates (f0) (f1) (f2))
  (:functions (v0) (v1))
  (:action a :parameters () :precondition (f0) :effect (f1))
  (:action b :parameters () :precondition (f1) :effect (f2))
  (:action c :parameters ()
    :precondition (and (f0) (>= (v1) 2))
    :effect (and (increase (v0) 2) (decrease (v1) 2))))
";

const TANDEM_PROBLEM: &str = "
(define (problem tandem-1) (:domain tandem)
  (:init (f0) (= (v0) 0) (= (v1) 2))
  (:goal (and (f2) (>= (v0) 10) (<= (v1) -10))))
";

const CARTS_DOMAIN: &str = "
(define (domain carts)
  (:requirements :strips :typing :numeric-fluents)
  (:types cart place)
  (:predicates (at ?c - cart ?p - place) (road ?a ?b - place) (cabin ?p - place))
  (:functions (timber ?p - place) (cargo ?c - cart))
  (:action load
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (timber ?p) 1) (<= (cargo ?c) 0))
    :effect (and (decrease (timber ?p) 1) (increase (cargo ?c) 1)))
  (:action unload
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (cargo ?c) 1))
    :effect (and (increase (timber ?p) 1) (decrease (cargo ?c) 1)))
  (:action move
    :parameters (?c - cart ?a ?b - place)
    :precondition (and (at ?c ?a) (road ?a ?b))
    :effect (and (not (at ?c ?a)) (at ?c ?b)))
  (:action fell
    :parameters (?p - place)
    :precondition (cabin ?p)
    :effect (increase (timber ?p) 1)))
";

fn crt_problem(cabin: bool) -> String {
    format!(
        "
(define (problem crt) (:domain carts)
  (:objects v1 - cart p1 p2 - place)
  (:init (at v1 p1) (road p1 p2) (road p2 p1) {}
    (= (timber p1) 1) (= (timber p2) 0) (= (cargo v1) 0))
  (:goal (>= (timber p1) 2)))
",
        if cabin { "(cabin p1)" } else { "" }
    )
}

fn five_cart_problem() -> String {
    let carts: Vec<String> = (1..=5).map(|i| format!("c{i}")).collect();
    let mut init = String::from("(road a b) (road b a) (= (timber a) 1) (= (timber b) 0)");
    for c in &carts {
        let _ = write!(init, " (at {c} a) (= (cargo {c}) 0)");
    }
    format!(
        "
(define (problem five-cart) (:domain carts)
  (:objects {} - cart a b - place)
  (:init {init})
  (:goal (>= (timber b) 1)))
",
        carts.join(" ")
    )
}

const DISTORTION_DOMAIN: &str = "
(define (domain distortion)
  (:requirements :strips :numeric-fluents)
  (:predicates (free) (built))
  (:functions (ra) (rb))
  (:action build
    :parameters ()
    :precondition (and (free) (>= (ra) 1))
    :effect (and (not (free)) (built) (decrease (ra) 1)))
  (:action give
    :parameters ()
    :precondition (>= (ra) 1)
    :effect (and (decrease (ra) 1) (increase (rb) 1)))
  (:action make
    :parameters ()
    :precondition (free)
    :effect (increase (ra) 1))
  (:action take
    :parameters ()
    :precondition (>= (rb) 1)
    :effect (and (decrease (rb) 1) (increase (ra) 1))))
";

const DISTORTION_PROBLEM: &str = "
(define (problem distortion-1) (:domain distortion)
  (:init (free) (= (ra) 2) (= (rb) 0))
  (:goal (and (built) (>= (ra) 1) (>= (rb) 1))))
";

const PERSISTENCE_DOMAIN: &str = "
(define (domain persistence)
  (:requirements :strips :typing :numeric-fluents)
  (:types site)
  (:predicates (empty ?s - site) (house ?s - site))
  (:functions (wood))
  (:action build
    :parameters (?s - site)
    :precondition (and (empty ?s) (>= (wood) 1))
    :effect (and (not (empty ?s)) (house ?s) (decrease (wood) 1)))
  (:action saw
    :parameters ()
    :precondition ()
    :effect (increase (wood) 1)))
";

const PERSISTENCE_PROBLEM: &str = "
(define (problem persistence-1) (:domain persistence)
  (:objects s1 s2 - site)
  (:init (empty s1) (empty s2) (= (wood) 1))
  (:goal (and (house s1) (house s2))))
";

const CORRIDOR_DOMAIN: &str = "
(define (domain corridor)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (next ?a ?b - cell))
  (:action step
    :parameters (?a ?b - cell)
    :precondition (and (at ?a) (next ?a ?b))
    :effect (and (not (at ?a)) (at ?b))))
";

const CORRIDOR_PROBLEM: &str = "
(define (problem corridor-3) (:domain corridor)
  (:objects c0 c1 c2 c3 - cell)
  (:init (at c0) (next c0 c1) (next c1 c2) (next c2 c3) (next c1 c0) (next c2 c1) (next c3 c2))
  (:goal (at c3)))
";

const PACKAGE_DOMAIN: &str = "
(define (domain package)
  (:requirements :strips :typing)
  (:types truck pkg)
  (:predicates (waiting ?p - pkg) (in ?p - pkg ?t - truck) (delivered ?p - pkg))
  (:action pick
    :parameters (?p - pkg ?t - truck)
    :precondition (waiting ?p)
    :effect (and (not (waiting ?p)) (in ?p ?t)))
  (:action drop
    :parameters (?p - pkg ?t - truck)
    :precondition (in ?p ?t)
    :effect (and (not (in ?p ?t)) (delivered ?p))))
";

const PACKAGE_PROBLEM: &str = "
(define (problem package-1) (:domain package)
  (:objects t1 t2 - truck p - pkg)
  (:init (waiting p))
  (:goal (delivered p)))
";

const BUILD_CART_DOMAIN: &str = "
(define (domain build-cart)
  (:requirements :strips :typing :numeric-fluents)
  (:types cart place)
  (:predicates (unbuilt ?c - cart) (ready ?c - cart) (at ?c - cart ?p - place) (yard ?p - place))
  (:functions (space ?c - cart) (timber ?p - place) (delivered))
  (:action build
    :parameters (?c - cart ?p - place)
    :precondition (and (unbuilt ?c) (yard ?p) (>= (timber ?p) 2))
    :effect (and (not (unbuilt ?c)) (ready ?c) (at ?c ?p)
                 (decrease (timber ?p) 2) (assign (space ?c) 1)))
  (:action haul
    :parameters (?c - cart ?p - place)
    :precondition (and (ready ?c) (at ?c ?p) (>= (space ?c) 1) (>= (timber ?p) 1))
    :effect (and (decrease (timber ?p) 1) (increase (delivered) 1)))
  (:action fell
    :parameters (?p - place)
    :precondition (yard ?p)
    :effect (increase (timber ?p) 1)))
";

const BUILD_CART_PROBLEM: &str = "
(define (problem build-cart-1) (:domain build-cart)
  (:objects k - cart y - place)
  (:init (unbuilt k) (yard y) (= (space k) 0) (= (timber y) 2) (= (delivered) 0))
  (:goal (>= (delivered) 1)))
";

const EMPTY_GOAL_PROBLEM: &str = "
(define (problem empty-goal) (:domain corridor)
  (:objects c0 c1 - cell)
  (:init (at c0) (next c0 c1))
  (:goal (and)))
";

pub fn fixture(name: &str) -> Option<Fixture> {
    let (name, domain, problem): (&'static str, String, String) = match name {
        "tandem" => ("tandem", TANDEM_DOMAIN.into(), TANDEM_PROBLEM.into()),
        "crt" => ("crt", CARTS_DOMAIN.into(), crt_problem(false)),
        "crt-cabin" => ("crt-cabin", CARTS_DOMAIN.into(), crt_problem(true)),
        "five-cart" => ("five-cart", CARTS_DOMAIN.into(), five_cart_problem()),
        "helpful-distortion" => ("helpful-distortion", DISTORTION_DOMAIN.into(), DISTORTION_PROBLEM.into()),
        "resource-persistence" => ("resource-persistence", PERSISTENCE_DOMAIN.into(), PERSISTENCE_PROBLEM.into()),
        "corridor" => ("corridor", CORRIDOR_DOMAIN.into(), CORRIDOR_PROBLEM.into()),
        "package" => ("package", PACKAGE_DOMAIN.into(), PACKAGE_PROBLEM.into()),
        "build-cart" => ("build-cart", BUILD_CART_DOMAIN.into(), BUILD_CART_PROBLEM.into()),
        "pump-unsolvable" => {
            let (d, p) = pump_catalyst(2, 3);
            ("pump-unsolvable", d, p)
        }
        "pump-solvable" => {
            let (d, p) = pump_catalyst(2, 2);
            ("pump-solvable", d, p)
        }
        "empty-goal" => ("empty-goal", CORRIDOR_DOMAIN.into(), EMPTY_GOAL_PROBLEM.into()),
        _ => return None,
    };
    Some(Fixture { name, domain, problem })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("unknown domain '{0}'")]
    UnknownDomain(String),
    #[error("size {size} is outside {min}..={max} for {domain}")]
    SizeOutOfRange {
        domain: &'static str,
        size: usize,
        min: usize,
        max: usize,
    },
}

pub const GENERATED_DOMAINS: &[&str] = &["market-trader", "mini-settlers", "pump-catalyst"];

/// Domain and problem text for a generated instance.
pub fn generate(domain: &str, size: usize, seed: u64) -> Result<(String, String), GenerateError> {
    let check = |name: &'static str, min: usize, max: usize| {
        if (min..=max).contains(&size) {
            Ok(())
        } else {
            Err(GenerateError::SizeOutOfRange {
                domain: name,
                size,
                min,
                max,
            })
        }
    };
    match domain {
        "market-trader" => {
            check("market-trader", 2, 8)?;
            Ok(market_trader(size, seed))
        }
        "mini-settlers" => {
            check("mini-settlers", 2, 6)?;
            Ok(mini_settlers(size, seed))
        }
        "pump-catalyst" => {
            check("pump-catalyst", 1, 6)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let threshold = rng.gen_range(1..=size + 1);
            Ok(pump_catalyst(size, threshold))
        }
        _ => Err(GenerateError::UnknownDomain(domain.to_string())),
    }
}

pub const MARKET_TRADER_DOMAIN: &str = "
(define (domain market-trader)
  (:requirements :strips :typing :numeric-fluents)
  (:types market good)
  (:predicates (at ?m - market) (road ?a ?b - market))
  (:functions (money) (food) (space) (capacity) (holding ?g - good)
              (buy-price ?g - good ?m - market) (sell-price ?g - good ?m - market)
              (food-price ?m - market) (distance ?a ?b - market))
  (:action buy
    :parameters (?g - good ?m - market)
    :precondition (and (at ?m) (>= (money) (buy-price ?g ?m)) (>= (space) 1))
    :effect (and (decrease (money) (buy-price ?g ?m)) (increase (holding ?g) 1) (decrease (space) 1)))
  (:action sell
    :parameters (?g - good ?m - market)
    :precondition (and (at ?m) (>= (holding ?g) 1) (<= (space) (- (capacity) 1)))
    :effect (and (increase (money) (sell-price ?g ?m)) (decrease (holding ?g) 1) (increase (space) 1)))
  (:action feed
    :parameters (?m - market)
    :precondition (and (at ?m) (>= (money) (food-price ?m)))
    :effect (and (decrease (money) (food-price ?m)) (increase (food) 1)))
  (:action travel
    :parameters (?a ?b - market)
    :precondition (and (at ?a) (road ?a ?b) (>= (food) (distance ?a ?b)))
    :effect (and (not (at ?a)) (at ?b) (decrease (food) (distance ?a ?b)))))
";

const GAIN: std::ops::RangeInclusive<i64> = 900..=1000;
const GOODS: usize = 4;

fn market_trader(markets: usize, seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goods = GOODS;
    let names: Vec<String> = (0..markets).map(|i| format!("m{i}")).collect();
    let gnames: Vec<String> = (0..goods).map(|i| format!("g{i}")).collect();
    let mut init = String::new();
    // each good is cheap at one market and dear at another; g0 is cheap where the trader starts
    let mut value = vec![vec![0i64; markets]; goods];
    for (g, row) in value.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v = rng.gen_range(8..=12);
        }
        let mut idx: Vec<usize> = (0..markets).collect();
        idx.shuffle(&mut rng);
        if g == 0 {
            let p = idx.iter().position(|&m| m == 0).unwrap();
            idx.swap(0, p);
        }
        row[idx[0]] = rng.gen_range(3..=4);
        row[idx[1]] = rng.gen_range(14..=18);
    }
    for (g, gn) in gnames.iter().enumerate() {
        for (m, mn) in names.iter().enumerate() {
            let v = value[g][m];
            let _ = write!(init, "\n    (= (buy-price {gn} {mn}) {v}) (= (sell-price {gn} {mn}) {})", v - 1);
        }
        let _ = write!(init, "\n    (= (holding {gn}) 0)");
    }
    for (a, an) in names.iter().enumerate() {
        let _ = write!(init, "\n    (= (food-price {an}) 1)");
        for (b, bn) in names.iter().enumerate() {
            if a != b {
                let d = rng.gen_range(1..=2);
                let _ = write!(init, " (road {an} {bn}) (= (distance {an} {bn}) {d})");
            }
        }
    }
    let capacity = 2;
    let money = 6;
    let target = money + rng.gen_range(GAIN);
    let _ = write!(
        init,
        "\n    (at m0) (= (money) {money}) (= (food) 0) (= (space) {capacity}) (= (capacity) {capacity})"
    );
    let problem = format!(
        "(define (problem market-trader-{markets}-{seed}) (:domain market-trader)\n  (:objects {} - market {} - good)\n  (:init{init})\n  (:goal (>= (money) {target})))\n",
        names.join(" "),
        gnames.join(" ")
    );
    (MARKET_TRADER_DOMAIN.to_string(), problem)
}

pub const MINI_SETTLERS_DOMAIN: &str = "
(define (domain mini-settlers)
  (:requirements :strips :typing :numeric-fluents)
  (:types place cart)
  (:predicates (at ?c - cart ?p - place) (road ?a ?b - place) (woodland ?p - place)
               (mountain ?p - place) (sawmill ?p - place) (site ?p - place) (house ?p - place))
  (:functions (timber ?p - place) (wood ?p - place) (stone ?p - place)
              (carried-wood ?c - cart) (carried-stone ?c - cart) (load ?c - cart) (capacity))
  (:action fell
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (woodland ?p))
    :effect (increase (timber ?p) 1))
  (:action saw
    :parameters (?p - place)
    :precondition (and (sawmill ?p) (>= (timber ?p) 1))
    :effect (and (decrease (timber ?p) 1) (increase (wood ?p) 1)))
  (:action quarry
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (mountain ?p))
    :effect (increase (stone ?p) 1))
  (:action build
    :parameters (?p - place)
    :precondition (and (site ?p) (>= (wood ?p) 1) (>= (stone ?p) 1))
    :effect (and (not (site ?p)) (house ?p) (decrease (wood ?p) 1) (decrease (stone ?p) 1)))
  (:action move
    :parameters (?c - cart ?a ?b - place)
    :precondition (and (at ?c ?a) (road ?a ?b))
    :effect (and (not (at ?c ?a)) (at ?c ?b)))
  (:action load-wood
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (wood ?p) 1) (<= (load ?c) (- (capacity) 1)))
    :effect (and (decrease (wood ?p) 1) (increase (carried-wood ?c) 1) (increase (load ?c) 1)))
  (:action unload-wood
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (carried-wood ?c) 1))
    :effect (and (increase (wood ?p) 1) (decrease (carried-wood ?c) 1) (decrease (load ?c) 1)))
  (:action load-stone
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (stone ?p) 1) (<= (load ?c) (- (capacity) 1)))
    :effect (and (decrease (stone ?p) 1) (increase (carried-stone ?c) 1) (increase (load ?c) 1)))
  (:action unload-stone
    :parameters (?c - cart ?p - place)
    :precondition (and (at ?c ?p) (>= (carried-stone ?c) 1))
    :effect (and (increase (stone ?p) 1) (decrease (carried-stone ?c) 1) (decrease (load ?c) 1))))
";

fn mini_settlers(places: usize, seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..places).map(|i| format!("l{i}")).collect();
    let mut init = String::from("(at k l0) (= (capacity) 2) (= (carried-wood k) 0) (= (carried-stone k) 0) (= (load k) 0)");
    for (i, n) in names.iter().enumerate() {
        let _ = write!(init, "\n    (= (timber {n}) 0) (= (wood {n}) 0) (= (stone {n}) 0)");
        if i > 0 {
            let p = &names[i - 1];
            let _ = write!(init, " (road {p} {n}) (road {n} {p})");
        }
    }
    let _ = write!(init, "\n    (woodland l1) (sawmill l1)");
    let mountain = if places > 2 { rng.gen_range(2..places) } else { 0 };
    let _ = write!(init, " (mountain {})", names[mountain]);
    let mut goal = String::from("(>= (wood l1) 2)");
    if places > 2 {
        let site = rng.gen_range(0..places);
        let _ = write!(init, " (site {})", names[site]);
        let _ = write!(goal, " (house {})", names[site]);
    }
    let problem = format!(
        "(define (problem mini-settlers-{places}-{seed}) (:domain mini-settlers)\n  (:objects {} - place k - cart)\n  (:init {init})\n  (:goal (and {goal})))\n",
        names.join(" ")
    );
    (MINI_SETTLERS_DOMAIN.to_string(), problem)
}

pub const PUMP_DOMAIN: &str = "
(define (domain pump-catalyst)
  (:requirements :strips :typing :numeric-fluents)
  (:types pump)
  (:predicates (watered))
  (:functions (pumping ?p - pump) (flow) (threshold))
  (:action activate
    :parameters (?p - pump)
    :precondition (<= (pumping ?p) 0)
    :effect (and (increase (pumping ?p) 1) (increase (flow) 1)))
  (:action deactivate
    :parameters (?p - pump)
    :precondition (>= (pumping ?p) 1)
    :effect (and (decrease (pumping ?p) 1) (decrease (flow) 1)))
  (:action irrigate
    :parameters ()
    :precondition (>= (flow) (threshold))
    :effect (watered)))
";

/// `pumps` on/off pumps feeding a flow that must reach `threshold`.
pub fn pump_catalyst(pumps: usize, threshold: usize) -> (String, String) {
    let names: Vec<String> = (1..=pumps).map(|i| format!("p{i}")).collect();
    let mut init = format!("(= (flow) 0) (= (threshold) {threshold})");
    for n in &names {
        let _ = write!(init, " (= (pumping {n}) 0)");
    }
    let problem = format!(
        "(define (problem pump-{pumps}-{threshold}) (:domain pump-catalyst)\n  (:objects {} - pump)\n  (:init {init})\n  (:goal (watered)))\n",
        names.join(" ")
    );
    (PUMP_DOMAIN.to_string(), problem)
}
