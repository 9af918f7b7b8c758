use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop update on node {0}")]
    SelfLoop(u32),

    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: u32, n: u32 },

    #[error("update on {{{u},{v}}} would drive weight {weight} to {result}")]
    NegativeWeight { u: u32, v: u32, weight: u64, result: i128 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance not eligible: {0}")]
    Ineligible(String),

    #[error("internal invariant failure: {0}")]
    Internal(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
