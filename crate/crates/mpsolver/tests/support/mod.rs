#![allow(dead_code)]

use mpsolver::{Integrality, MpModel, RowOp, Sense, SolveStatus, VarId, VarKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<(Vec<f64>, RowOp, f64)>,
    obj: Vec<f64>,
    sense: Sense,
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(0..=4);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for _ in 0..n {
        let l = rng.gen_range(-5..=2) as f64;
        lower.push(l);
        upper.push(l + rng.gen_range(0..=8) as f64);
    }
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();
            let op = match rng.gen_range(0..5) {
                0 => RowOp::Eq,
                1 | 2 => RowOp::Le,
                _ => RowOp::Ge,
            };
            (a, op, rng.gen_range(-10..=10) as f64)
        })
        .collect();
    let obj = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    Instance { n, lower, upper, rows, obj, sense }
}

pub fn build(inst: &Instance, kind: VarKind) -> (MpModel, Vec<VarId>) {
    let mut m = MpModel::new();
    let vars: Vec<VarId> = (0..inst.n)
        .map(|j| m.add_variable(format!("x{j}"), inst.lower[j], inst.upper[j], kind).unwrap())
        .collect();
    for (i, (a, op, b)) in inst.rows.iter().enumerate() {
        let terms = vars.iter().zip(a).map(|(&v, &c)| (v, c)).collect();
        m.add_constraint(format!("r{i}"), terms, *op, *b).unwrap();
    }
    m.set_objective(inst.sense, vars.iter().zip(&inst.obj).map(|(&v, &c)| (v, c)).collect())
        .unwrap();
    (m, vars)
}

fn feasible(inst: &Instance, x: &[f64], tol: f64) -> bool {
    for j in 0..inst.n {
        if x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol {
            return false;
        }
    }
    inst.rows.iter().all(|(a, op, b)| {
        let lhs: f64 = a.iter().zip(x).map(|(c, v)| c * v).sum();
        match op {
            RowOp::Le => lhs <= b + tol,
            RowOp::Ge => lhs >= b - tol,
            RowOp::Eq => (lhs - b).abs() <= tol,
        }
    })
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in 0..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimum over all vertices of the (bounded) feasible polytope.
pub fn vertex_optimum(inst: &Instance) -> Option<f64> {
    let n = inst.n;
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), inst.lower[j]));
        planes.push((e, inst.upper[j]));
    }
    for (a, _, b) in &inst.rows {
        planes.push((a.clone(), *b));
    }
    let k = planes.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(inst, &x, 1e-7) {
                let z: f64 = inst.obj.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(match (best, inst.sense) {
                    (None, _) => z,
                    (Some(b), Sense::Minimize) => b.min(z),
                    (Some(b), Sense::Maximize) => b.max(z),
                });
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn lattice_optimum(inst: &Instance) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut x: Vec<f64> = inst.lower.clone();
    loop {
        if feasible(inst, &x, 1e-9) {
            let z: f64 = inst.obj.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(match (best, inst.sense) {
                (None, _) => z,
                (Some(b), Sense::Minimize) => b.min(z),
                (Some(b), Sense::Maximize) => b.max(z),
            });
        }
        let mut j = 0;
        loop {
            if j == inst.n {
                return best;
            }
            if x[j] < inst.upper[j] {
                x[j] += 1.0;
                break;
            }
            x[j] = inst.lower[j];
            j += 1;
        }
    }
}

#[derive(Debug, Default)]
pub struct OracleReport {
    pub instances: usize,
    pub feasible: usize,
    pub mismatches: Vec<String>,
}

/// Solves `count` random LPs and compares each against vertex enumeration.
pub fn check_lps(seed: u64, count: usize) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport::default();
    for i in 0..count {
        let inst = random_instance(&mut rng);
        let (m, _) = build(&inst, VarKind::Continuous);
        let sol = m.solve();
        rep.instances += 1;
        match vertex_optimum(&inst) {
            Some(z) => {
                rep.feasible += 1;
                if sol.status != SolveStatus::Optimal || (sol.objective - z).abs() > 1e-6 {
                    rep.mismatches.push(format!("lp {i}: {:?} {} vs {z}", sol.status, sol.objective));
                } else if m.max_violation(&sol.values) > 1e-6 {
                    rep.mismatches.push(format!("lp {i}: solution violates a row"));
                }
            }
            None if sol.status != SolveStatus::Infeasible => {
                rep.mismatches.push(format!("lp {i}: {:?} but no feasible vertex", sol.status));
            }
            None => {}
        }
    }
    rep
}

/// Solves `count` random MIPs and compares each against lattice enumeration.
pub fn check_mips(seed: u64, count: usize) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport::default();
    for i in 0..count {
        let inst = random_instance(&mut rng);
        let (m, _) = build(&inst, VarKind::Integer);
        let sol = m.solve();
        rep.instances += 1;
        match lattice_optimum(&inst) {
            Some(z) => {
                rep.feasible += 1;
                if sol.status != SolveStatus::Optimal || (sol.objective - z).abs() > 1e-6 {
                    rep.mismatches.push(format!("mip {i}: {:?} {} vs {z}", sol.status, sol.objective));
                } else if sol.values.iter().any(|x| *x != x.round()) {
                    rep.mismatches.push(format!("mip {i}: fractional value"));
                }
                let relaxed = m.solve_with(Integrality::Relax);
                let ok = match inst.sense {
                    Sense::Maximize => relaxed.objective >= sol.objective - 1e-6,
                    Sense::Minimize => relaxed.objective <= sol.objective + 1e-6,
                };
                if !ok {
                    rep.mismatches.push(format!("mip {i}: relaxation {} does not bound {}", relaxed.objective, sol.objective));
                }
            }
            None if sol.status != SolveStatus::Infeasible => {
                rep.mismatches.push(format!("mip {i}: {:?} but no feasible point", sol.status));
            }
            None => {}
        }
    }
    rep
}
