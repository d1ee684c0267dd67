use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for n = {n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("reservoir not found after {attempts} attempts")]
    ReservoirNotFound { attempts: usize },
    #[error("embedding not found: {0}")]
    EmbeddingNotFound(String),
    #[error("overlap violation: {0}")]
    Overlap(String),
    #[error("stale switch: {0}")]
    StaleSwitch(String),
    #[error("gadget half not immersed: {0}")]
    NotImmersed(String),
    #[error("parity mismatch: |S ∩ A| = {s_a} but pi(w) = {pi}")]
    ParityMismatch { s_a: usize, pi: u8 },
    #[error("no matching absorbing tuple: {0}")]
    NoMatchingTuple(String),
    #[error("balancer pools exhausted with skew {skew}")]
    PoolsExhausted { skew: i64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
