use thiserror::Error;

use crate::model::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("partial assignment: variable {0} has no value")]
    PartialAssignment(VarId),
    #[error("value {value} is outside the domain of variable {var}")]
    OutOfDomain { var: VarId, value: i64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("unknown ordering heuristic {0:?}")]
    UnknownHeuristic(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidTreeDecomposition(String),
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("inconsistent elimination tables: {0}")]
    Inconsistent(String),
}
