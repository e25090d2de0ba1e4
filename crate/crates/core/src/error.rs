use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval pair #{index}: {reason}")]
    InvalidPair { index: usize, reason: String },

    #[error("instance failed validation with {} violation(s): {}", .0.len(), summarize(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("invalid path {id}: {reason}")]
    InvalidPath { id: u64, reason: String },

    #[error("bid for node {node} must be positive and finite, got {value}")]
    NonPositiveBid { node: usize, value: f64 },

    #[error("dimension mismatch: expected {expected_nodes} bids and {expected_edges} scores, got {nodes} and {edges}")]
    DimensionMismatch {
        expected_nodes: usize,
        expected_edges: usize,
        nodes: usize,
        edges: usize,
    },

    #[error("assignment covers {got} edges but the instance has {expected}")]
    IncompleteAssignment { expected: usize, got: usize },

    #[error("assignment is infeasible: {0}")]
    Infeasible(String),

    #[error("event-order contradiction: the event constraint graph has a cycle")]
    EventOrderContradiction,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line} (record {record}): {message}")]
    Parse {
        line: usize,
        record: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn summarize(violations: &[Violation]) -> String {
    let mut out = violations
        .iter()
        .take(3)
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ");
    if violations.len() > 3 {
        out.push_str("; ...");
    }
    out
}
