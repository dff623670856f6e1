use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex id {id} out of range for graph with {n} vertices")]
    VertexOutOfRange { id: u32, n: usize },

    #[error("edge ({u}, {v}) has nonpositive weight {w}")]
    NonpositiveWeight { u: u32, v: u32, w: f64 },

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("duplicate vertex id {0} in vertex set")]
    DuplicateVertex(u32),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has self-loops; random walks require a loop-free graph")]
    SelfLoopsPresent,

    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(u32),

    #[error("partition covers {got} vertices, graph has {expected}")]
    PartitionSizeMismatch { expected: usize, got: usize },

    #[error("partition labels are not dense: missing community id {0}")]
    SparseCommunityIds(u32),

    #[error("community id {id} out of range ({count} communities)")]
    CommunityOutOfRange { id: u32, count: usize },

    #[error("label vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge (estimated eigenvalue gap {gap:.3e})")]
    NoConvergence { gap: f64 },

    #[error("{path}:{line}: malformed edge line: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("invalid experiment spec: {0}")]
    BadSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
