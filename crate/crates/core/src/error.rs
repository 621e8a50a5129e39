use thiserror::Error;

use crate::dfg::GraphError;

/// Failure to read a DFG or resource-library document.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, message: message.into() }
    }
}

/// Resource-library validation failures.
#[derive(Debug, Error, PartialEq)]
pub enum LibraryError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("op type `{0}` is not characterized in the resource library")]
    MissingOpType(String),
    #[error("op type `{0}` is declared twice")]
    DuplicateType(String),
    #[error("op type `{0}` has no voltage levels")]
    NoLevels(String),
    #[error("op type `{op}` lists {cycles} cycles on more than one level")]
    DuplicateCycles { op: String, cycles: u32 },
    #[error("op type `{op}`: {field} is negative ({value})")]
    NegativePower { op: String, field: &'static str, value: f64 },
    #[error("op type `{op}`: levels must be listed fastest first ({reason})")]
    LevelOrder { op: String, reason: String },
}

/// Errors raised while costing a schedule.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostError {
    #[error("node {node}: no `{op}` level takes {duration} cycles")]
    UnknownLevel { node: u32, op: String, duration: u32 },
    #[error("node {node}: Single-Vdd mode only admits the fastest level, got {duration} cycles")]
    NotSingleVdd { node: u32, duration: u32 },
}

/// Errors raised by the brute-force enumerator.
#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("graph has {nodes} nodes, enumeration is limited to {max}")]
    TooManyNodes { nodes: usize, max: usize },
    #[error("state-space estimate {estimate:.3e} exceeds the cap of {cap}")]
    StateSpaceTooLarge { estimate: f64, cap: u64 },
    #[error(transparent)]
    Cost(#[from] CostError),
}
