use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("partial matching has no completion of size {target}")]
    NotExtendable { target: usize },

    #[error("{count} completions exceed the enumeration limit of {limit}")]
    EnumerationLimit { count: String, limit: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("expected {expected} points, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("net would hold up to {predicted} points, above the cap of {cap}")]
    NetTooLarge { predicted: f64, cap: usize },

    #[error("tuple is not {lambda}-sparse: point {witness} has {neighbors} other points within distance {lambda}")]
    NotSparse {
        witness: usize,
        neighbors: usize,
        lambda: f64,
    },

    #[error("point {index} lies outside the ball of radius {radius} around the origin")]
    OutsideDomain { index: usize, radius: f64 },

    #[error("scale of point {index} is {scale}, outside the admissible range {low}..={high}")]
    ScaleOutOfRange {
        index: usize,
        scale: i64,
        low: i64,
        high: i64,
    },

    #[error("no seed multiset for scale {scale} covered its points after {attempts} attempts")]
    SeedRetriesExhausted { scale: i64, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
