//! Exact solver for sparse discrete optimization problems built on graph-based
//! local elimination.
//!
//! A [`Problem`] maximizes a sum of objective components (linear terms and
//! tabular functions) over finite integer domains subject to linear
//! constraints. Its structure is captured by an [`InteractionGraph`]; an
//! [`EliminationSequence`] of variables or blocks drives either the
//! forward/backward elimination solver in [`elim`] or dynamic programming over
//! a tree decomposition in [`treedec`]. The exhaustive solver in [`oracle`]
//! serves as ground truth for both.

pub mod elim;
pub mod error;
pub mod graph;
pub mod local;
pub mod model;
pub mod oracle;
pub mod ordering;
pub mod samples;
pub mod treedec;

pub use error::{Error, Result};
pub use graph::{InteractionGraph, NeighborhoodKind, Partition};
pub use local::{LocalTable, Score, TableEntry};
pub use model::{
    Assignment, LinearConstraint, ObjectiveComponent, Problem, Relation, Solution, SolveStats,
    Status, TableComponent, VarId, Variable, Violation,
};
pub use ordering::{EliminationRecord, EliminationSequence, EliminationTree};
pub use treedec::TreeDecomposition;
