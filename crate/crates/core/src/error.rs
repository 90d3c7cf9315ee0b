use thiserror::Error;

use crate::graphstore::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({detail})")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("svd did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("eps must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("node {0} already exists")]
    DuplicateNode(NodeId),

    #[error("node id 0 is reserved for the empty-neighbor sentinel")]
    ReservedNodeId,

    #[error("edge {0}-{1} already present")]
    EdgeExists(NodeId, NodeId),

    #[error("edge {0}-{1} not present")]
    EdgeMissing(NodeId, NodeId),

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("node {node} has {count} incident edges, limit is {limit}")]
    TooManyEdges {
        node: NodeId,
        count: usize,
        limit: usize,
    },

    #[error("malformed update: {0}")]
    MalformedDelta(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("state file: {0}")]
    StateFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
