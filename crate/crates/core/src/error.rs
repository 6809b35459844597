use std::path::PathBuf;

use thiserror::Error;

use crate::iri::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("input file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("graph is cyclic, transitive closure unreliable (witness cycle: {})", format_nodes(.witness))]
    Cyclic { witness: Vec<NodeId> },

    #[error("self-loop on node {0}; reflexive edges must be removed first")]
    SelfLoop(NodeId),

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("graph has no cycle")]
    NoCycle,

    #[error("wcnf parse error at line {line}: {message}")]
    Wcnf { line: usize, message: String },

    #[error("hard clauses are unsatisfiable")]
    Unsatisfiable,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
}

fn format_nodes(nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}
