use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {node} out of range for a graph on {p} nodes")]
    NodeOutOfRange { node: usize, p: usize },

    #[error("graphs are limited to {max} nodes, got {p}")]
    TooManyNodes { p: usize, max: usize },

    #[error("edge {from}->{to} closes a directed cycle")]
    Cycle { from: usize, to: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("partially directed graph has no consistent DAG extension: {0}")]
    Inconsistent(String),

    #[error("Markov equivalence class exceeds the size cap of {cap}")]
    MecTooLarge { cap: usize },

    #[error("intervention family is not conservative: every target contains node {node}")]
    NotConservative { node: usize },

    #[error("invalid intervention family: {0}")]
    InvalidFamily(String),

    #[error("not enough non-intervened rows to fit node {node}: have {have}, need {need}")]
    InsufficientData { node: usize, have: usize, need: usize },

    #[error("singular regressor Gram matrix when fitting node {node}")]
    Singular { node: usize },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid budget: {0}")]
    InvalidBudget(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("search space too large: {size} designs exceeds the guard of {guard}")]
    SearchTooLarge { size: f64, guard: f64 },

    #[error("structure learner failed: {0}")]
    Learner(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
