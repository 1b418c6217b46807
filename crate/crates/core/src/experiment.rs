//! Single runs, run statistics and configuration sweeps.

use std::io;
use std::time::{Duration, Instant};

use crate::analysis::Analysis;
use crate::config::HeuristicConfig;
use crate::heuristic::Evaluator;
use crate::model::{load, GroundTask, PddlError};
use crate::search::{search, validate, Outcome, Plan, SearchConfig};

pub const STATS_SCHEMA_VERSION: u32 = 1;

pub const STATS_HEADER: &[&str] = &[
    "schema",
    "problem",
    "config",
    "fingerprint",
    "solved",
    "outcome",
    "plan_length",
    "expanded",
    "evaluated",
    "lp_solves",
    "lp_build_ms",
    "lp_solve_ms",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub problem: String,
    pub config: String,
    pub fingerprint: String,
    pub solved: bool,
    pub outcome: String,
    pub plan_length: Option<usize>,
    pub expanded: u64,
    pub evaluated: u64,
    pub lp_solves: usize,
    pub lp_build_time: Duration,
    pub lp_solve_time: Duration,
    pub wall_time: Duration,
}

impl RunStats {
    fn failed(problem: &str, cfg: &NamedConfig, outcome: String, wall_time: Duration) -> Self {
        RunStats {
            problem: problem.to_string(),
            config: cfg.name.clone(),
            fingerprint: cfg.fingerprint(),
            solved: false,
            outcome,
            plan_length: None,
            expanded: 0,
            evaluated: 0,
            lp_solves: 0,
            lp_build_time: Duration::ZERO,
            lp_solve_time: Duration::ZERO,
            wall_time,
        }
    }

    pub fn record(&self) -> Vec<String> {
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1000.0);
        vec![
            STATS_SCHEMA_VERSION.to_string(),
            self.problem.clone(),
            self.config.clone(),
            self.fingerprint.clone(),
            self.solved.to_string(),
            self.outcome.clone(),
            self.plan_length.map(|l| l.to_string()).unwrap_or_default(),
            self.expanded.to_string(),
            self.evaluated.to_string(),
            self.lp_solves.to_string(),
            ms(self.lp_build_time),
            ms(self.lp_solve_time),
            ms(self.wall_time),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedConfig {
    pub name: String,
    pub heuristic: HeuristicConfig,
    pub search: SearchConfig,
}

impl NamedConfig {
    pub fn new(name: impl Into<String>, heuristic: HeuristicConfig, search: SearchConfig) -> Self {
        NamedConfig {
            name: name.into(),
            heuristic,
            search,
        }
    }

    pub fn fingerprint(&self) -> String {
        let s = &self.search;
        format!(
            "{};ehc={};W={};nodes={};time={}",
            self.heuristic.fingerprint(),
            s.ehc,
            s.wastar_weight,
            s.max_expansions,
            s.time_limit.as_secs_f64()
        )
    }
}

pub fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Solved => "solved",
        Outcome::Exhausted => "exhausted",
        Outcome::RootDeadEnd => "root-dead-end",
        Outcome::ExpansionLimit => "expansion-limit",
        Outcome::TimeLimit => "time-limit",
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub task: GroundTask,
    pub outcome: Outcome,
    pub plan: Option<Plan>,
    pub stats: RunStats,
}

/// Parses, analyses and searches one problem.
pub fn run_problem(problem: &str, domain_text: &str, problem_text: &str, cfg: &NamedConfig) -> Result<RunReport, PddlError> {
    let start = Instant::now();
    let task = load(domain_text, problem_text)?;
    let analysis = Analysis::new(&task);
    let ev = Evaluator::new(&analysis, cfg.heuristic.clone());
    let r = search(&ev, &cfg.search);
    if let Some(plan) = &r.plan {
        if let Err(e) = validate(&task, plan) {
            log::error!("{problem}: search returned an invalid plan: {e}");
        }
    }
    let stats = RunStats {
        problem: problem.to_string(),
        config: cfg.name.clone(),
        fingerprint: cfg.fingerprint(),
        solved: r.outcome == Outcome::Solved,
        outcome: outcome_label(r.outcome).to_string(),
        plan_length: r.plan.as_ref().map(Plan::len),
        expanded: r.stats.expanded,
        evaluated: r.stats.evaluated,
        lp_solves: r.stats.lp.solves,
        lp_build_time: r.stats.lp.build_time,
        lp_solve_time: r.stats.lp.solve_time,
        wall_time: start.elapsed(),
    };
    Ok(RunReport {
        task,
        outcome: r.outcome,
        plan: r.plan,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchProblem {
    pub id: String,
    pub domain: String,
    pub problem: String,
}

fn run_cell(p: &BenchProblem, c: &NamedConfig) -> RunStats {
    let start = Instant::now();
    match run_problem(&p.id, &p.domain, &p.problem, c) {
        Ok(r) => r.stats,
        Err(e) => {
            log::warn!("{}: {e}", p.id);
            RunStats::failed(&p.id, c, "input-error".into(), start.elapsed())
        }
    }
}

/// Runs every problem under every config. Rows come back in problem-major order.
pub fn bench(problems: &[BenchProblem], configs: &[NamedConfig], jobs: usize) -> Vec<RunStats> {
    let cells: Vec<(&BenchProblem, &NamedConfig)> = problems
        .iter()
        .flat_map(|p| configs.iter().map(move |c| (p, c)))
        .collect();
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => return pool.install(|| cells.par_iter().map(|(p, c)| run_cell(p, c)).collect()),
            Err(e) => log::warn!("could not start {jobs} workers: {e}"),
        }
    }
    let _ = jobs;
    cells.iter().map(|(p, c)| run_cell(p, c)).collect()
}

pub fn write_csv<W: io::Write>(out: W, rows: &[RunStats], header: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if header {
        w.write_record(STATS_HEADER)?;
    }
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub config: String,
    pub solved: usize,
    pub total: usize,
}

/// Solved count per config, in first-appearance order.
pub fn coverage(rows: &[RunStats]) -> Vec<Coverage> {
    let mut out: Vec<Coverage> = Vec::new();
    for r in rows {
        let i = match out.iter().position(|c| c.config == r.config) {
            Some(i) => i,
            None => {
                out.push(Coverage {
                    config: r.config.clone(),
                    solved: 0,
                    total: 0,
                });
                out.len() - 1
            }
        };
        out[i].total += 1;
        out[i].solved += r.solved as usize;
    }
    out
}

pub fn format_coverage(cov: &[Coverage]) -> String {
    let width = cov.iter().map(|c| c.config.len()).max().unwrap_or(6).max(6);
    let mut s = format!("{:<width$}  solved/total\n", "config");
    for c in cov {
        s.push_str(&format!("{:<width$}  {}/{}\n", c.config, c.solved, c.total));
    }
    s
}
