use thiserror::Error;

use crate::graph::{EdgeId, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmbError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
    #[error("invalid temporal path: {0}")]
    InvalidPath(String),
    #[error("edge {edge} carries {labels} labels but its multiplicity is {multiplicity}")]
    MultiplicityViolation {
        edge: EdgeId,
        labels: usize,
        multiplicity: u64,
    },
    #[error("distance between a vertex and itself is undefined (vertex {0})")]
    SameVertex(Vertex),
    #[error("vertex {0} is out of range")]
    UnknownVertex(Vertex),
    #[error("vertex {target} is not temporally reachable from {from}")]
    Unreachable { from: Vertex, target: Vertex },
    #[error("solver needs exactly one source, instance has {0}")]
    WrongSourceCount(usize),
    #[error("measure {0} is not supported by this solver")]
    UnsupportedMeasure(String),
    #[error("edge {edge} has multiplicity {multiplicity}, solver needs at least {required}")]
    MultiplicityTooSmall {
        edge: EdgeId,
        multiplicity: u64,
        required: u64,
    },
    #[error("underlying graph is not a tree")]
    NotATree,
    #[error("search space of {0} labelings exceeds the configured limit")]
    SearchSpaceTooLarge(String),
    #[error("invalid gadget parameters: {0}")]
    InvalidParams(String),
    #[error("clause {0} is not satisfied by the assignment")]
    UnsatisfiedClause(usize),
    #[error("clause {0} does not have exactly three literals")]
    NotThreeSat(usize),
    #[error("clause {0} contains a variable and its negation")]
    ContradictoryClause(usize),
    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentSize { expected: usize, got: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("no exact polynomial regime applies: {0}")]
    NoTractableRegime(String),
}

pub type Result<T> = std::result::Result<T, TmbError>;
