//! Generalized fair matching on colored bipartite graphs.

#![allow(clippy::needless_range_loop)]

pub mod flow;
pub mod generate;
pub mod graph;
pub mod ilp;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod solver;
pub mod structure;
pub mod verify;

use thiserror::Error;

pub use model::{Instance, InstanceBuilder, Matching, ModelError};

/// Outcome of a decision procedure; a yes carries a witness matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Yes(Matching),
    No,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }

    pub fn matching(&self) -> Option<&Matching> {
        match self {
            Answer::Yes(m) => Some(m),
            Answer::No => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Structure(#[from] structure::StructureError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Budget(#[from] oracle::BudgetExceeded),
    #[error(transparent)]
    Lp(#[from] ilp::LpParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
