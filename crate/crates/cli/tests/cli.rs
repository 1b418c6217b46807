use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lprpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lprpg")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_fixture(dir: &Path, name: &str) -> (String, String) {
    let out = dir.join(name);
    let o = lprpg(&["fixture", name, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    (
        out.join("domain.pddl").to_string_lossy().into_owned(),
        out.join("problem.pddl").to_string_lossy().into_owned(),
    )
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(code(&lprpg(&["run", "a", "b", "--frobnicate"])), 2);
    assert_eq!(code(&lprpg(&["run", "a", "b", "--heuristic", "blind"])), 2);
    assert_eq!(code(&lprpg(&["run", "a", "b", "--weight", "k:0.5"])), 2);
    assert_eq!(code(&lprpg(&[])), 2);
}

#[test]
fn missing_file_is_input_error() {
    assert_eq!(code(&lprpg(&["run", "/nonexistent/d.pddl", "/nonexistent/p.pddl"])), 3);
}

#[test]
fn malformed_problem_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let (d, _) = write_fixture(dir.path(), "corridor");
    let bad = dir.path().join("bad.pddl");
    fs::write(&bad, "(define (problem x) (:domain corridor) (:init (at c9))").unwrap();
    let o = lprpg(&["run", &d, bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
}

#[test]
fn solves_and_writes_plan_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p) = write_fixture(dir.path(), "crt-cabin");
    let plan = dir.path().join("plan.txt");
    let stats = dir.path().join("stats.csv");
    for _ in 0..2 {
        let o = lprpg(&["run", &d, &p, "--plan", plan.to_str().unwrap(), "--stats", stats.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&plan).unwrap();
    assert!(text.lines().all(|l| l.contains(": (")), "{text}");
    let csv = fs::read_to_string(&stats).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("schema,problem,config,fingerprint,solved"));
    let o = lprpg(&["validate", &d, &p, plan.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn root_dead_end_and_exhaustion_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p) = write_fixture(dir.path(), "pump-unsolvable");
    assert_eq!(code(&lprpg(&["run", &d, &p])), 4);
    let o = lprpg(&["run", &d, &p, "--heuristic", "metricff"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn dumps_go_to_stderr_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p) = write_fixture(dir.path(), "five-cart");
    let lp = dir.path().join("root.lp");
    let o = lprpg(&["run", &d, &p, "--dump-analysis", "--dump-rpg", "--dump-trace", "--dump-lp", lp.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("F(0)"), "{err}");
    assert!(err.contains("h = "), "{err}");
    assert!(fs::read_to_string(&lp).unwrap().to_lowercase().contains("subject to"));
}

#[test]
fn generate_is_deterministic_and_range_checked() {
    let a = lprpg(&["generate", "market-trader", "--size", "2", "--seed", "7"]);
    let b = lprpg(&["generate", "market-trader", "--size", "2", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&lprpg(&["generate", "market-trader", "--size", "9"])), 2);
    assert_eq!(code(&lprpg(&["generate", "pump-catalyst", "--size", "7"])), 2);
}

#[test]
fn bench_writes_rows_and_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("suite.txt");
    let matrix = dir.path().join("matrix.txt");
    let out = dir.path().join("out.csv");
    fs::write(&manifest, "fixture:corridor\n").unwrap();
    fs::write(&matrix, "lp: --heuristic lprpg\nff: --heuristic metricff\n").unwrap();
    let o = lprpg(&[
        "bench",
        manifest.to_str().unwrap(),
        "--matrix",
        matrix.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/1"));
    fs::write(&manifest, "").unwrap();
    let o = lprpg(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1);
}
