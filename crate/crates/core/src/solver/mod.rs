//! The four parameterized solvers.

pub mod fes;
pub mod nd;
pub mod smallk;
pub mod twdp;

use thiserror::Error;

use crate::structure::StructureError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("{param} is {value}, above the limit {limit}")]
    OverLimit {
        param: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("dynamic program reached {states} states at one node, above the bound {cap}")]
    StateCap { states: usize, cap: u128 },
    #[error("interval assignment admits no per-color flow; ILP1 and flow disagree")]
    FlowContradiction,
    #[error("quotient matching is not fair: {0}")]
    UnfairQuotient(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}
