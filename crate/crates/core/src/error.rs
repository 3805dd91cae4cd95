use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(u32),

    #[error("trace has zero flops, bytes per flop is undefined")]
    ZeroFlops,

    #[error("order is not a permutation of the trace records: {0}")]
    NotPermutation(String),

    #[error("cache sizes must be strictly increasing")]
    InvalidSizes,

    #[error("component graph contains a cycle")]
    CyclicComponents,

    #[error("invalid priority `{0}`")]
    InvalidPriority(String),

    #[error("invalid heuristic parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
