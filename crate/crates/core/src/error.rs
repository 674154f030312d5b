// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown kernel `{0}` (expected one of: direct, sq, qt, sqt)")]
    UnknownKernel(String),

    #[error("unknown export format `{0}` (expected dot or json)")]
    UnknownFormat(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("constant `{0}` is not bound")]
    UnboundConstant(String),

    #[error("graph is not in topological order: node {node} reads node {operand}")]
    Cycle { node: usize, operand: usize },

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("netlist tracing failed: {0}")]
    Trace(String),

    #[error("invalid fixed-point format: {0}")]
    Format(String),

    #[error("fixed-point overflow")]
    Overflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed {kind} file: {reason}")]
    Malformed { kind: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
