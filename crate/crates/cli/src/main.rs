use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgAction, Args, Parser, Subcommand};
use lprpg_core::analysis::Analysis;
use lprpg_core::config::{HeuristicConfig, HeuristicMode, IntegralityPolicy, WeightScheme};
use lprpg_core::domains;
use lprpg_core::experiment::{self, BenchProblem, NamedConfig};
use lprpg_core::heuristic::Evaluator;
use lprpg_core::model::load;
use lprpg_core::search::{validate, Execution, Outcome, Plan, SearchConfig};

mod manifest;

const EXIT_SOLVED: u8 = 0;
const EXIT_EXHAUSTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_ROOT_DEAD_END: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "lprpg", version, about = "Numeric forward-search planner with an LP-based relaxed planning graph heuristic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem.
    Run(RunArgs),
    /// Write a generated problem instance.
    Generate(GenerateArgs),
    /// Run a manifest of problems under a matrix of configurations.
    Bench(BenchArgs),
    /// Write one of the bundled fixtures.
    Fixture(FixtureArgs),
    /// Check a plan file against a problem.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct HeuristicArgs {
    #[arg(long, default_value = "lprpg", value_parser = parse_mode)]
    heuristic: HeuristicMode,
    /// `k:<factor>`, `hadd` or `hmax`
    #[arg(long, default_value = "k:3")]
    weight: WeightScheme,
    #[arg(long, default_value = "first-layer")]
    ints: IntegralityPolicy,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    lp_prop_goals: bool,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    lp_landmarks: bool,
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    lp_all_props: bool,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    lp_num_goal_conjunct: bool,
    /// LP solves allowed per state evaluation
    #[arg(long, default_value_t = 500)]
    lp_budget: usize,
    #[arg(long, default_value_t = 5.0)]
    wastar_weight: f64,
    #[arg(long)]
    no_ehc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    max_expansions: u64,
    /// Seconds
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    /// Evaluate successors on one thread.
    #[arg(long)]
    sequential: bool,
}

fn parse_mode(s: &str) -> Result<HeuristicMode, String> {
    match s.parse::<HeuristicMode>() {
        Ok(HeuristicMode::Blind) | Err(_) => Err(format!(
            "expected one of lprpg, metricff, metricff-sapa, lprpg-ff; got '{s}'"
        )),
        Ok(m) => Ok(m),
    }
}

impl HeuristicArgs {
    fn heuristic(&self) -> Result<HeuristicConfig, String> {
        let cfg = HeuristicConfig {
            mode: self.heuristic,
            weight: self.weight,
            ints: self.ints,
            lp_prop_goals: self.lp_prop_goals,
            lp_landmarks: self.lp_landmarks,
            lp_all_props: self.lp_all_props,
            lp_num_goal_conjunct: self.lp_num_goal_conjunct,
            lp_budget: self.lp_budget,
            ..HeuristicConfig::default()
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    fn search(&self) -> Result<SearchConfig, String> {
        if !(self.wastar_weight >= 1.0) {
            return Err(format!("--wastar-weight must be at least 1, got {}", self.wastar_weight));
        }
        if !(self.time_limit > 0.0) {
            return Err(format!("--time-limit must be positive, got {}", self.time_limit));
        }
        Ok(SearchConfig {
            wastar_weight: self.wastar_weight,
            ehc: !self.no_ehc,
            max_expansions: self.max_expansions,
            time_limit: Duration::from_secs_f64(self.time_limit),
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
            ..SearchConfig::default()
        })
    }

    pub fn named(&self, name: &str) -> Result<NamedConfig, String> {
        Ok(NamedConfig::new(name, self.heuristic()?, self.search()?))
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    domain: PathBuf,
    problem: PathBuf,
    #[command(flatten)]
    config: HeuristicArgs,
    /// Write the plan here instead of stdout.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Append a statistics row to this CSV file (header written when new).
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Print the variable classification and landmarks.
    #[arg(long)]
    dump_analysis: bool,
    /// Print the relaxed planning graph of the initial state.
    #[arg(long)]
    dump_rpg: bool,
    /// Print the relaxed plan extracted at the initial state.
    #[arg(long)]
    dump_trace: bool,
    /// Write the initial-state flow model in LP format.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// market-trader, mini-settlers or pump-catalyst
    domain: String,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for domain.pddl and problem.pddl; the problem goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// One problem per line: `<domain> <problem>`, `fixture:<name>` or `generate:<domain>:<size>:<seed>`.
    manifest: PathBuf,
    /// One config per line: `<name>: <run flags>`. Defaults to lprpg and metricff.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Applied to every config without its own budget flags.
    #[arg(long, default_value_t = 100_000)]
    max_expansions: u64,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    name: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// List the bundled fixtures.
    #[arg(long)]
    list: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    domain: PathBuf,
    problem: PathBuf,
    plan: PathBuf,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_SOLVED });
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Generate(a) => generate(a),
        Command::Bench(a) => bench(a),
        Command::Fixture(a) => fixture(a),
        Command::Validate(a) => validate_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(a: RunArgs) -> Result<u8, Failure> {
    let cfg = a.config.named("run").map_err(Failure::Usage)?;
    let domain = read(&a.domain)?;
    let problem = read(&a.problem)?;
    let id = a.problem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();

    if a.dump_analysis || a.dump_rpg || a.dump_trace || a.dump_lp.is_some() {
        let task = load(&domain, &problem).map_err(|e| Failure::Input(e.to_string()))?;
        let analysis = Analysis::new(&task);
        if a.dump_analysis {
            eprintln!("{}", analysis.report());
        }
        let ev = Evaluator::new(&analysis, cfg.heuristic.clone());
        let init = task.init.clone();
        let lm = ev.initial_landmarks(&init);
        let mut g = ev.graph(&init, &lm);
        if a.dump_rpg {
            eprintln!("{}", g.dump(&task));
        }
        if let Some(path) = &a.dump_lp {
            match &g.model {
                Some(m) => fs::write(path, m.lp_text())?,
                None => log::warn!("{} builds no flow model; nothing written to {}", ev.mode(), path.display()),
            }
        }
        if a.dump_trace {
            let r = ev.extract(&mut g, &init, &lm);
            eprintln!("h = {}\n{}", r.h, r.format_trace(&task));
        }
    }

    let report = experiment::run_problem(&id, &domain, &problem, &cfg).map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(path) = &a.stats {
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
        experiment::write_csv(file, std::slice::from_ref(&report.stats), fresh)
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let s = &report.stats;
    eprintln!(
        "{}: {} expanded={} evaluated={} lp-solves={} wall={:.3}s",
        id,
        s.outcome,
        s.expanded,
        s.evaluated,
        s.lp_solves,
        s.wall_time.as_secs_f64()
    );
    match report.outcome {
        Outcome::Solved => {
            let text = report.plan.as_ref().map(|p| p.format(&report.task)).unwrap_or_default();
            match &a.plan {
                Some(path) => fs::write(path, text)?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
            Ok(EXIT_SOLVED)
        }
        Outcome::RootDeadEnd => Ok(EXIT_ROOT_DEAD_END),
        Outcome::Exhausted | Outcome::ExpansionLimit | Outcome::TimeLimit => Ok(EXIT_EXHAUSTED),
    }
}

fn generate(a: GenerateArgs) -> Result<u8, Failure> {
    let (domain, problem) = domains::generate(&a.domain, a.size, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;
    match a.out {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("domain.pddl"), domain)?;
            fs::write(dir.join("problem.pddl"), problem)?;
        }
        None => io::stdout().write_all(problem.as_bytes())?,
    }
    Ok(EXIT_SOLVED)
}

fn fixture(a: FixtureArgs) -> Result<u8, Failure> {
    if a.list || a.name.is_none() {
        for n in domains::FIXTURES {
            println!("{n}");
        }
        return Ok(EXIT_SOLVED);
    }
    let name = a.name.unwrap();
    let f = domains::fixture(&name).ok_or_else(|| Failure::Usage(format!("unknown fixture '{name}'")))?;
    match a.out {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("domain.pddl"), f.domain)?;
            fs::write(dir.join("problem.pddl"), f.problem)?;
        }
        None => print!("{}\n{}", f.domain, f.problem),
    }
    Ok(EXIT_SOLVED)
}

fn validate_cmd(a: ValidateArgs) -> Result<u8, Failure> {
    let task = load(&read(&a.domain)?, &read(&a.problem)?).map_err(|e| Failure::Input(e.to_string()))?;
    let plan = Plan::parse(&task, &read(&a.plan)?).map_err(Failure::Input)?;
    match validate(&task, &plan) {
        Ok(_) => {
            println!("valid plan of {} steps", plan.len());
            Ok(EXIT_SOLVED)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(EXIT_EXHAUSTED)
        }
    }
}

fn bench(a: BenchArgs) -> Result<u8, Failure> {
    let base = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let problems: Vec<BenchProblem> = manifest::parse_manifest(&read(&a.manifest)?, &base).map_err(Failure::Input)?;
    let budget = [
        "--max-expansions".to_string(),
        a.max_expansions.to_string(),
        "--time-limit".to_string(),
        a.time_limit.to_string(),
    ];
    let configs = match &a.matrix {
        Some(path) => manifest::parse_matrix(&read(path)?, &budget).map_err(Failure::Usage)?,
        None => manifest::parse_matrix("lprpg: --heuristic lprpg\nmetricff: --heuristic metricff\n", &budget)
            .map_err(Failure::Usage)?,
    };
    let rows = experiment::bench(&problems, &configs, a.jobs.max(1));
    let write = |w: Box<dyn Write>| experiment::write_csv(w, &rows, true).map_err(|e| Failure::Input(e.to_string()));
    match &a.out {
        Some(path) => write(Box::new(fs::File::create(path)?))?,
        None => write(Box::new(io::stdout()))?,
    }
    eprint!("{}", experiment::format_coverage(&experiment::coverage(&rows)));
    Ok(EXIT_SOLVED)
}
