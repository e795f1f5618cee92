use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge id {id} is not in 0..{m}")]
    EdgeIdNotDense { id: usize, m: usize },
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(usize),
    #[error("edge ids must be given for all edges or for none")]
    MixedEdgeIds,
    #[error("node feature table has {rows} rows but graph has {n} nodes")]
    NodeFeatureRows { rows: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}, line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Graph {
        path: String,
        #[source]
        source: GraphError,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("cycle length {0} outside supported range 2..=6")]
    CycleLength(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },
    #[error("non-finite input to {0}")]
    NonFiniteInput(&'static str),
    #[error("non-finite gradient for parameter {0}")]
    NonFiniteGradient(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("evaluation mask is empty")]
    EmptyMask,
    #[error("cannot split {edges} edges into {splits} parts")]
    TooFewEdges { edges: usize, splits: usize },
    #[error("invalid split fractions: {0}")]
    Fractions(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("non-finite loss at epoch {epoch} (seed {seed})")]
    Diverged { seed: u64, epoch: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Data(#[from] DataError),
}
