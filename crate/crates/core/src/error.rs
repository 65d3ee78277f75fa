use thiserror::Error;

use crate::netgraph::{MutationKind, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "invalid network dimensions: {d_input} inputs, {d_output} outputs (both must be >= 1)"
    )]
    InvalidDimensions { d_input: usize, d_output: usize },

    #[error("expected a vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("architecture is frozen; structural edits are not allowed")]
    Frozen,

    #[error("mutation {0:?} is not applicable to this network")]
    NotApplicable(MutationKind),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("invalid connection {src} -> {dst}: {reason}")]
    InvalidConnection {
        src: NodeId,
        dst: NodeId,
        reason: &'static str,
    },

    #[error("node {0} is not a hidden node")]
    NotHidden(NodeId),

    #[error("structural audit failed: {0}")]
    Inconsistent(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("unsupported task `{name}`; supported tasks: {}", supported.join(", "))]
    UnknownTask {
        name: String,
        supported: Vec<&'static str>,
    },

    #[error("invalid action for {task}: {reason}")]
    InvalidAction { task: &'static str, reason: String },

    #[error("episode already finished; reset before stepping")]
    EpisodeDone,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("agent in slot {slot} produced non-finite fitness {fitness}")]
    NonFiniteFitness { slot: usize, fitness: f64 },

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
