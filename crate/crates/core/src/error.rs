//! Error type shared by every module in this crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cluster count {clusters} does not divide node count {n}")]
    NonDivisible { n: usize, clusters: usize },
    #[error("reconstruction degree k={k} out of range for n={n}")]
    InvalidK { n: usize, k: usize },
    #[error("bandwidth must be non-negative")]
    NegativeBandwidth,
    #[error("intra-cluster bandwidth must be at least the cross-cluster bandwidth")]
    OrderViolation,
    #[error("storage capacity must be non-negative")]
    NegativeAlpha,
    #[error("compromised node count l={l} exceeds the limit {limit}")]
    InvalidL { l: usize, limit: usize },
    #[error("compromised cluster count {lc} exceeds cluster count {clusters}")]
    InvalidLc { lc: usize, clusters: usize },
    #[error("adversary out of range: {0}")]
    InvalidAdversary(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid placement: {0}")]
    PlacementViolation(String),
    #[error("unknown cluster id {0}")]
    UnknownCluster(usize),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("bound violated by enumeration witness:\n{0}")]
    BoundViolated(String),
    #[error("field order {q} too small for code length {n}")]
    FieldTooSmall { q: u64, n: usize },
    #[error("field order {0} is not prime")]
    NotPrime(u64),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("node {0} already failed")]
    AlreadyFailed(usize),
    #[error("data collector needs n-1 distinct active nodes: {0}")]
    InsufficientNodes(String),
    #[error("secrecy violation for clusters {clusters:?} observing coordinates {coordinates:?}")]
    SecrecyViolation {
        clusters: Vec<usize>,
        coordinates: Vec<usize>,
    },
    #[error("cannot parse number: {0}")]
    InvalidNumber(String),
}
