use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid topology, protocol, attack or chain parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The protocol cannot answer probability queries.
    #[error("protocol `{0}` does not support probability queries")]
    Capability(String),

    #[error("routing table has no entry for node {0}")]
    MissingEntry(NodeId),

    #[error("edge ({0}, {1}) is not part of the topology")]
    NotAnEdge(NodeId, NodeId),

    /// A counting argument that must hold for valid inputs was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
