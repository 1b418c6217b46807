//! A small dense LP/MIP solver.
//!
//! Models are built incrementally through [`MpModel`], solved by a bounded
//! two-phase primal simplex, and integer columns are handled by depth-first
//! branch-and-bound. [`MpModel::push_scratch`] / [`MpModel::pop_scratch`]
//! allow temporary modifications that are undone exactly.

mod branch;
mod error;
mod lpformat;
mod model;
mod simplex;

pub use error::ModelError;
pub use lpformat::write_lp;
pub use model::{
    Constraint, Integrality, MpModel, MpSolution, Objective, RowId, RowOp, Sense, SolveStatus,
    VarId, VarKind, Variable,
};

/// Numerical tolerances and work budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    /// Simplex pivots per LP solve.
    pub pivot_limit: usize,
    /// Branch-and-bound nodes per MIP solve.
    pub node_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-6,
            integrality_tol: 1e-6,
            pivot_limit: 100_000,
            node_limit: 100_000,
        }
    }
}
