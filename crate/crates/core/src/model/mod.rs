//! PDDL parsing, grounding and exact state-transition semantics.

pub mod ast;
mod error;
pub mod ground;
pub mod sexpr;
pub mod strict;
mod task;

pub use ast::{parse_domain, parse_problem, DomainAst, ProblemAst};
pub use error::PddlError;
pub use ground::{ground, ground_with_cap, load, DEFAULT_ACTION_CAP};
pub use strict::{rewrite_strict_inequalities, ConditionSite, StrictRewrite};
pub use task::*;
