use thiserror::Error;

use crate::marking::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is still referenced and cannot be removed")]
    NodeInUse(NodeId),
    #[error("unknown marking handle {0}")]
    UnknownMarking(u32),
    #[error("arc {0} -> {1} would close a cycle")]
    Cycle(NodeId, NodeId),
    #[error("arc {0} -> {1} already exists")]
    DuplicateArc(NodeId, NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("marking is not a leaf of the tree representation")]
    NotALeaf,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("not a power circuit: some node has a non-integral value")]
    NotAPowerCircuit,
}

pub type Result<T, E = CircuitError> = std::result::Result<T, E>;
