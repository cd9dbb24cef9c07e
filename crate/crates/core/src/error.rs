use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("adjacency matrix has {got} entries, expected {expected}")]
    MatrixShape { got: usize, expected: usize },
    #[error("expected a one-pointed graph, got {0} marked vertices")]
    NotOnePointed(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("operation needs at least one marked vertex")]
    NoMarkedVertex,
    #[error("no edge {from} -> {to} with parallel index {parallel}")]
    EdgeAbsent { from: usize, to: usize, parallel: u32 },
    #[error("invalid subgraph selection: {0}")]
    InvalidSelection(String),
    #[error("scon enumeration requires an explicit ordinary-vertex bound")]
    MissingMaxOrdinary,
    #[error("unsupported number of marked vertices: {0}")]
    UnsupportedPointCount(usize),
    #[error("family filters are only defined for one-pointed graphs")]
    UnsupportedFamily,
    #[error("identity check needs a graph with at least one edge")]
    TrivialGraph,
    #[error("cross edge runs from the sink block back into the source block")]
    CrossEdgeDirection,
    #[error("obstruction fixtures only cover orders 0, 1 and 2 (got {0})")]
    OrderNotCovered(usize),
    #[error("partner graph does not match the gluing construction: {0}")]
    MismatchedConstruction(String),
    #[error("series bounds do not certify completeness: {0}")]
    IncompleteBounds(String),
    #[error("cannot parse graph key {0:?}")]
    ParseKey(String),
    #[error("unknown {kind} `{name}`")]
    UnknownSelector { kind: &'static str, name: String },
    #[error("cannot parse golden data: {0}")]
    Golden(String),
}

pub type Result<T> = std::result::Result<T, Error>;
