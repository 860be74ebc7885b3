use thiserror::Error;

/// Errors for pattern construction and the operations built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty component")]
    EmptyComponent,
    #[error("component {0:?} has fewer than 2 points")]
    SingletonComponent(Vec<usize>),
    #[error("components {0:?} and {1:?} share two or more points")]
    OverlapTooLarge(Vec<usize>, Vec<usize>),
    #[error("incidence graph is not connected")]
    NotConnected,
    #[error("incidence graph contains a cycle")]
    Cyclic,
    #[error("component {0:?} is contained in component {1:?}")]
    NonMaximal(Vec<usize>, Vec<usize>),
    #[error("point {point} out of range for period {period}")]
    OutOfRange { point: usize, period: usize },
    #[error("components are not adjacent at a single point")]
    NotAdjacent,
    #[error("no such component: {0:?}")]
    NoSuchComponent(Vec<usize>),
    #[error("power iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("path matrix is empty")]
    EmptyMatrix,
    #[error("invalid collapse: {0}")]
    CollapseInvalid(String),
    #[error("lift policy does not match pattern: {0}")]
    PolicyMismatch(String),
    #[error("post-verification failed: {0}")]
    VerificationFailed(String),
    #[error("no valid split pivot found")]
    PivotNotFound,
    #[error("bad range: n = {n}, k = {k}")]
    BadRange { n: usize, k: usize },
    #[error("NotRepresentable: no zero-entropy {k}-star pattern of period {n} exists")]
    NotRepresentable { n: usize, k: usize },
    #[error("period {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
