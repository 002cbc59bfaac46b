use thiserror::Error;

use crate::graph::{LabelId, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no sources")]
    NoSources,
    #[error("deleted node {0}")]
    DeletedNode(NodeId),
    #[error("node {0} out of range (n = {1})")]
    NodeOutOfRange(NodeId, usize),
    #[error("label {0} out of range (l = {1})")]
    LabelOutOfRange(LabelId, usize),
    #[error("no path to node {0}")]
    NoPath(NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("invalid weight {0}")]
    InvalidWeight(f64),
    #[error("unweighted required")]
    UnweightedRequired,
    #[error("weights must be >= 1")]
    WeightBelowOne,
    #[error("degenerate sampling: top level empty after {0} attempts")]
    DegenerateSampling(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
