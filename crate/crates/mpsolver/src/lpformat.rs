use std::fmt::Write;

use crate::model::{MpModel, RowOp, Sense, VarKind};

fn sanitize(name: &str, fallback: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        format!("{fallback}_{s}")
    } else {
        s
    }
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn linear(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut first = true;
    for (name, c) in terms {
        if c == 0.0 {
            continue;
        }
        match (c < 0.0, first) {
            (true, _) => out.push_str(" -"),
            (false, false) => out.push_str(" +"),
            (false, true) => {}
        }
        let mag = c.abs();
        if mag == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {} {name}", num(mag));
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Renders `model` in CPLEX LP text format.
pub fn write_lp(model: &MpModel) -> String {
    let names: Vec<String> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize(&v.name, &format!("x{j}")))
        .collect();
    let mut out = String::new();
    out.push_str(match model.objective().sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    linear(
        &mut out,
        model
            .objective()
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, &c)| (names[j].clone(), c)),
    );
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&c.name, &format!("r{i}")));
        linear(&mut out, c.terms.iter().map(|&(v, k)| (names[v.0].clone(), k)));
        let op = match c.op {
            RowOp::Le => "<=",
            RowOp::Ge => ">=",
            RowOp::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", num(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, name) in model.variables().iter().zip(&names) {
        if v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0 {
            continue;
        }
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {name} free");
            }
            _ if v.lower == v.upper => {
                let _ = writeln!(out, " {name} = {}", num(v.lower));
            }
            _ => {
                let _ = writeln!(out, " {} <= {name} <= {}", num(v.lower), num(v.upper));
            }
        }
    }
    let generals: Vec<&String> = model
        .variables()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Integer)
        .map(|(_, n)| n)
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for n in generals {
            let _ = writeln!(out, " {n}");
        }
    }
    let binaries: Vec<&String> = model
        .variables()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_sections() {
        let mut m = MpModel::new();
        let x = m.add_variable("x", 0.0, 4.0, VarKind::Integer).unwrap();
        let y = m.add_variable("y(a b)", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous).unwrap();
        let z = m.add_variable("z", 0.0, 1.0, VarKind::Binary).unwrap();
        m.add_constraint("c1", vec![(x, 1.0), (y, -2.5)], RowOp::Le, 3.0).unwrap();
        m.set_objective(Sense::Maximize, vec![(x, 1.0), (z, 2.0)]).unwrap();
        let text = write_lp(&m);
        assert!(text.starts_with("Maximize\n obj: x + 2 z\n"));
        assert!(text.contains(" c1: x - 2.5 y_a_b_ <= 3\n"));
        assert!(text.contains(" y_a_b_ free\n"));
        assert!(text.contains("Generals\n x\n"));
        assert!(text.contains("Binaries\n z\n"));
        assert!(text.ends_with("End\n"));
    }
}
