use std::fs;
use std::path::Path;

use clap::Parser;
use lprpg_core::domains;
use lprpg_core::experiment::{BenchProblem, NamedConfig};

use crate::HeuristicArgs;

#[derive(Parser, Debug)]
#[command(no_binary_name = true, args_override_self = true)]
struct MatrixLine {
    #[command(flatten)]
    config: HeuristicArgs,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<BenchProblem>, String> {
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        if let Some(name) = line.strip_prefix("fixture:") {
            let f = domains::fixture(name).ok_or_else(|| format!("line {n}: unknown fixture '{name}'"))?;
            out.push(BenchProblem {
                id: name.to_string(),
                domain: f.domain,
                problem: f.problem,
            });
        } else if let Some(spec) = line.strip_prefix("generate:") {
            let parts: Vec<&str> = spec.split(':').collect();
            let [dom, size, seed] = parts[..] else {
                return Err(format!("line {n}: expected generate:<domain>:<size>:<seed>"));
            };
            let size: usize = size.parse().map_err(|_| format!("line {n}: bad size '{size}'"))?;
            let seed: u64 = seed.parse().map_err(|_| format!("line {n}: bad seed '{seed}'"))?;
            let (domain, problem) = domains::generate(dom, size, seed).map_err(|e| format!("line {n}: {e}"))?;
            out.push(BenchProblem {
                id: format!("{dom}-{size}-{seed}"),
                domain,
                problem,
            });
        } else {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [d, p] = parts[..] else {
                return Err(format!("line {n}: expected '<domain> <problem>'"));
            };
            let read = |f: &str| fs::read_to_string(base.join(f)).map_err(|e| format!("line {n}: {f}: {e}"));
            let id = Path::new(p)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.to_string());
            out.push(BenchProblem {
                id,
                domain: read(d)?,
                problem: read(p)?,
            });
        }
    }
    Ok(out)
}

/// `defaults` are prepended to every line so that explicit flags on the line win.
pub fn parse_matrix(text: &str, defaults: &[String]) -> Result<Vec<NamedConfig>, String> {
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        let (name, flags) = line
            .split_once(':')
            .ok_or_else(|| format!("matrix line {n}: expected '<name>: <flags>'"))?;
        let mut args: Vec<String> = defaults.to_vec();
        args.extend(flags.split_whitespace().map(String::from));
        let parsed = MatrixLine::try_parse_from(&args).map_err(|e| format!("matrix line {n}: {e}"))?;
        out.push(parsed.config.named(name.trim())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lprpg_core::config::{HeuristicMode, WeightScheme};

    #[test]
    fn matrix_lines_override_defaults() {
        let d = vec!["--max-expansions".to_string(), "10".to_string()];
        let m = parse_matrix("# sweep\nk1: --weight k:1\nff: --heuristic metricff --max-expansions 20\n", &d).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].heuristic.weight, WeightScheme::Layer(1.0));
        assert_eq!(m[0].search.max_expansions, 10);
        assert_eq!(m[1].heuristic.mode, HeuristicMode::MetricFf);
        assert_eq!(m[1].search.max_expansions, 20);
    }

    #[test]
    fn bad_matrix_flag_is_an_error() {
        assert!(parse_matrix("x: --bogus\n", &[]).is_err());
        assert!(parse_matrix("no colon here\n", &[]).is_err());
    }

    #[test]
    fn manifest_entries() {
        let m = parse_manifest("fixture:corridor\ngenerate:pump-catalyst:2:1  # pumps\n", Path::new(".")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1].id, "pump-catalyst-2-1");
        assert!(parse_manifest("fixture:nope\n", Path::new(".")).is_err());
        assert!(parse_manifest("only-one-path\n", Path::new(".")).is_err());
        assert!(parse_manifest("", Path::new(".")).unwrap().is_empty());
    }
}
