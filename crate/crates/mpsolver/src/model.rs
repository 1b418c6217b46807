use std::fmt;

use crate::error::ModelError;
use crate::simplex;
use crate::branch;
use crate::SolverConfig;

/// Index of a column in an [`MpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Index of a row in an [`MpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowOp {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowOp::Le => "<=",
            RowOp::Ge => ">=",
            RowOp::Eq => "=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub op: RowOp,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub sense: Sense,
    /// Dense coefficients; columns beyond the vector's length have weight zero.
    pub coefficients: Vec<f64>,
}

impl Default for Objective {
    fn default() -> Self {
        Objective {
            sense: Sense::Minimize,
            coefficients: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot or node budget exhausted before a proof of optimality.
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpSolution {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub pivots: usize,
    pub nodes: usize,
}

impl MpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub(crate) fn without_values(status: SolveStatus, pivots: usize, nodes: usize) -> Self {
        MpSolution {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            pivots,
            nodes,
        }
    }
}

/// Whether integrality markers are honoured by a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrality {
    Respect,
    Relax,
}

#[derive(Clone, Debug)]
struct Snapshot {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Objective,
}

/// An LP/MIP under construction.
///
/// Mutations are incremental. `push_scratch` records the complete model so a
/// later `pop_scratch` restores it exactly, including bounds, kinds and the
/// objective.
#[derive(Clone, Debug, Default)]
pub struct MpModel {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Objective,
    scratch: Vec<Snapshot>,
    config: SolverConfig,
}

impl MpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: SolverConfig) -> Self {
        MpModel {
            config,
            ..Self::default()
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: SolverConfig) {
        self.config = config;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.vars[var.0]
    }

    pub fn scratch_depth(&self) -> usize {
        self.scratch.len()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId, ModelError> {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds { lower, upper });
        }
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
        });
        Ok(VarId(self.vars.len() - 1))
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        op: RowOp,
        rhs: f64,
    ) -> Result<RowId, ModelError> {
        for &(v, _) in &terms {
            self.check_var(v)?;
        }
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.constraints.push(Constraint {
            name: name.into(),
            terms: merged,
            op,
            rhs,
        });
        Ok(RowId(self.constraints.len() - 1))
    }

    /// Adds `coef * var` to an existing row.
    pub fn add_term(&mut self, row: RowId, var: VarId, coef: f64) -> Result<(), ModelError> {
        self.check_var(var)?;
        let c = self
            .constraints
            .get_mut(row.0)
            .ok_or(ModelError::RowOutOfRange(row.0))?;
        match c.terms.iter_mut().find(|(w, _)| *w == var) {
            Some(entry) => entry.1 += coef,
            None => c.terms.push((var, coef)),
        }
        c.terms.retain(|(_, k)| *k != 0.0);
        Ok(())
    }

    pub fn set_rhs(&mut self, row: RowId, rhs: f64) -> Result<(), ModelError> {
        let c = self
            .constraints
            .get_mut(row.0)
            .ok_or(ModelError::RowOutOfRange(row.0))?;
        c.rhs = rhs;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        self.check_var(var)?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds { lower, upper });
        }
        let v = &mut self.vars[var.0];
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn set_variable_kind(&mut self, var: VarId, kind: VarKind) -> Result<(), ModelError> {
        self.check_var(var)?;
        let v = &mut self.vars[var.0];
        if kind == VarKind::Binary {
            v.lower = v.lower.max(0.0);
            v.upper = v.upper.min(1.0);
        }
        v.kind = kind;
        Ok(())
    }

    pub fn set_objective(&mut self, sense: Sense, coefficients: Vec<(VarId, f64)>) -> Result<(), ModelError> {
        let mut dense = vec![0.0; self.vars.len()];
        for (v, c) in coefficients {
            self.check_var(v)?;
            dense[v.0] += c;
        }
        self.objective = Objective {
            sense,
            coefficients: dense,
        };
        Ok(())
    }

    pub fn push_scratch(&mut self) {
        self.scratch.push(Snapshot {
            vars: self.vars.clone(),
            constraints: self.constraints.clone(),
            objective: self.objective.clone(),
        });
    }

    pub fn pop_scratch(&mut self) -> Result<(), ModelError> {
        let snap = self.scratch.pop().ok_or(ModelError::ScratchUnderflow)?;
        self.vars = snap.vars;
        self.constraints = snap.constraints;
        self.objective = snap.objective;
        Ok(())
    }

    pub fn has_integers(&self) -> bool {
        self.vars.iter().any(|v| v.kind != VarKind::Continuous)
    }

    pub fn solve(&self) -> MpSolution {
        self.solve_with(Integrality::Respect)
    }

    pub fn solve_with(&self, integrality: Integrality) -> MpSolution {
        if integrality == Integrality::Respect && self.has_integers() {
            branch::solve_mip(self)
        } else {
            let bounds: Vec<(f64, f64)> = self.vars.iter().map(|v| (v.lower, v.upper)).collect();
            simplex::solve_lp(self, &bounds)
        }
    }

    /// Maximum violation of any row or bound by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|(v, k)| k * values[v.0]).sum();
            let viol = match c.op {
                RowOp::Le => lhs - c.rhs,
                RowOp::Ge => c.rhs - lhs,
                RowOp::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .coefficients
            .iter()
            .zip(values)
            .map(|(c, x)| c * x)
            .sum()
    }

    fn check_var(&self, var: VarId) -> Result<(), ModelError> {
        if var.0 < self.vars.len() {
            Ok(())
        } else {
            Err(ModelError::VarOutOfRange(var.0))
        }
    }
}
