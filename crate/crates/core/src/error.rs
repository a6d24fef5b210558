use thiserror::Error;

/// Errors raised by graph construction, metric evaluation and clustering.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fixture format: {0}")]
    Fixture(String),

    #[error("configuration: {0}")]
    Config(String),

    /// The network is not connected; `components` lists each component's nodes.
    #[error("network is disconnected ({} components)", components.len())]
    Disconnected { components: Vec<Vec<usize>> },

    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("division by zero evaluating {0}")]
    DivisionByZero(&'static str),

    #[error("graph has {edges} edges; exhaustive search is limited to {limit}")]
    SizeLimit { edges: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
