use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid edge {u}-{v}: {reason}")]
    InvalidEdge { u: usize, v: usize, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} limit exceeded: {limit}")]
    CapExceeded { what: &'static str, limit: u64 },

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
