use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chain is not irreducible on interval [{lower}, {upper}] (state {state})")]
    NotIrreducible {
        lower: usize,
        upper: usize,
        state: usize,
    },
    #[error("state {state} out of range for a chain on 0..={max}")]
    StateOutOfRange { state: usize, max: usize },
    #[error("target state {target} is unreachable from state {from}")]
    Unreachable { target: usize, from: usize },
    #[error("stop state {stop} separates {from} from {at}")]
    BlockedPath { from: usize, at: usize, stop: usize },
    #[error("zero probability at state {state}")]
    ZeroProbability { state: usize },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("replication {replication} exceeded the step cap of {cap}")]
    StepCapExceeded { replication: u64, cap: u64 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
