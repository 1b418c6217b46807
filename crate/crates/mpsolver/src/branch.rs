//! Depth-first branch-and-bound over the simplex relaxation.

use crate::model::{MpModel, MpSolution, Sense, SolveStatus, VarKind};
use crate::simplex::solve_lp;

struct Node {
    bounds: Vec<(f64, f64)>,
}

pub(crate) fn solve_mip(model: &MpModel) -> MpSolution {
    let cfg = model.config();
    let tol = cfg.integrality_tol;
    let sense = match model.objective().sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let vars = model.variables();
    let mut root = Vec::with_capacity(vars.len());
    for v in vars {
        if v.kind == VarKind::Continuous {
            root.push((v.lower, v.upper));
        } else {
            let l = if v.lower.is_finite() { (v.lower - tol).ceil() } else { v.lower };
            let u = if v.upper.is_finite() { (v.upper + tol).floor() } else { v.upper };
            if l > u {
                return MpSolution::without_values(SolveStatus::Infeasible, 0, 0);
            }
            root.push((l, u));
        }
    }

    let mut stack = vec![Node { bounds: root }];
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut pivots = 0usize;
    let mut root_unbounded = false;

    while let Some(node) = stack.pop() {
        if nodes >= cfg.node_limit {
            log::warn!("branch-and-bound node limit {} reached", cfg.node_limit);
            return match incumbent {
                Some((_, values)) => MpSolution {
                    status: SolveStatus::IterationLimit,
                    objective: model.objective_value(&values),
                    values,
                    pivots,
                    nodes,
                },
                None => MpSolution::without_values(SolveStatus::IterationLimit, pivots, nodes),
            };
        }
        nodes += 1;
        let relax = solve_lp(model, &node.bounds);
        pivots += relax.pivots;
        match relax.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if nodes == 1 {
                    root_unbounded = true;
                    break;
                }
                continue;
            }
            SolveStatus::IterationLimit => {
                return MpSolution::without_values(SolveStatus::IterationLimit, pivots, nodes)
            }
            SolveStatus::Optimal => {}
        }
        let scaled = sense * relax.objective;
        if let Some((best, _)) = &incumbent {
            if scaled >= *best - 1e-9 {
                continue;
            }
        }
        let fractional = vars.iter().enumerate().find(|(j, v)| {
            v.kind != VarKind::Continuous && {
                let x = relax.values[*j];
                (x - x.round()).abs() > tol
            }
        });
        match fractional {
            None => {
                let mut values = relax.values;
                for (j, v) in vars.iter().enumerate() {
                    if v.kind != VarKind::Continuous {
                        values[j] = values[j].round();
                    }
                }
                incumbent = Some((scaled, values));
            }
            Some((j, _)) => {
                let x = relax.values[j];
                let (l, u) = node.bounds[j];
                let mut up = node.bounds.clone();
                up[j] = (x.ceil(), u);
                let mut down = node.bounds;
                down[j] = (l, x.floor());
                // floor branch is explored first
                stack.push(Node { bounds: up });
                stack.push(Node { bounds: down });
            }
        }
    }

    if root_unbounded {
        return MpSolution::without_values(SolveStatus::Unbounded, pivots, nodes);
    }
    match incumbent {
        Some((_, values)) => MpSolution {
            status: SolveStatus::Optimal,
            objective: model.objective_value(&values),
            values,
            pivots,
            nodes,
        },
        None => MpSolution::without_values(SolveStatus::Infeasible, pivots, nodes),
    }
}
