use thiserror::Error;

/// Errors shared across the crate. Each variant corresponds to a guard that
/// callers can rely on programmatically; diagnostics carry enough data to
/// reconstruct what was rejected.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("not a generalized Cartan matrix: {0}")]
    NotGcm(String),
    #[error("matrix is not symmetrizable: {0}")]
    NotSymmetrizable(String),
    #[error("matrix is decomposable ({0} components); the index set must be connected")]
    Decomposable(usize),
    #[error("subset {0:?} is not of finite type")]
    NotFiniteType(Vec<usize>),
    #[error("matrix is not an element of the Weyl group (descent failed after {0} steps)")]
    NotInWeylGroup(usize),
    #[error("group enumeration exceeded the brute-force budget of {0}")]
    BeyondBruteForce(usize),
    #[error("decoration is not compatible: {0}")]
    NotCompatible(String),
    #[error("decoration is not a generalized Satake diagram")]
    NotGeneralizedSatake,
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("rank {0} exceeds the enumeration guard {1}")]
    RankGuardExceeded(usize, usize),
    #[error("order computation exceeded cap {0}")]
    OrderCapExceeded(usize),
    #[error("truncation overflow at height {height}; retry with working height >= {suggested}")]
    TruncationOverflow { height: usize, suggested: usize },
    #[error("computed Serre deviation disagrees with the closed form for ({i},{j}): {detail}")]
    CaseMismatch { i: usize, j: usize, detail: String },
    #[error("parse error at byte {position}: {message}")]
    ParseError { position: usize, message: String },
    #[error("unrecognized named type `{0}`")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
