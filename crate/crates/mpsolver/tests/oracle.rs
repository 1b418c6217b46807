//! Random LPs and MIPs checked against brute-force enumeration.

mod support;

use mpsolver::{MpModel, RowOp, Sense, SolveStatus, VarKind};
use support::{check_lps, check_mips};

#[test]
fn lp_matches_vertex_enumeration() {
    let rep = check_lps(11, 500);
    assert!(rep.mismatches.is_empty(), "{:?}", rep.mismatches);
    assert!(rep.feasible > 100);
}

#[test]
fn mip_matches_lattice_enumeration() {
    let rep = check_mips(29, 200);
    assert!(rep.mismatches.is_empty(), "{:?}", rep.mismatches);
}

#[test]
fn unbounded_and_free_columns() {
    let mut m = MpModel::new();
    let x = m.add_variable("x", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous).unwrap();
    let y = m.add_variable("y", f64::NEG_INFINITY, 3.0, VarKind::Continuous).unwrap();
    m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], RowOp::Le, 5.0).unwrap();
    m.set_objective(Sense::Maximize, vec![(x, 1.0)]).unwrap();
    assert_eq!(m.solve().status, SolveStatus::Unbounded);

    m.set_objective(Sense::Maximize, vec![(x, 1.0), (y, 2.0)]).unwrap();
    let s = m.solve();
    assert!(s.is_optimal());
    assert!((s.objective - 8.0).abs() < 1e-9);
    assert!((s.value(y) - 3.0).abs() < 1e-9);
}
