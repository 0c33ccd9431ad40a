use thiserror::Error;

/// Errors for constructing and evaluating convex functions, bodies,
/// weights and metrics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {dim}: {what} needs n in {{1, 2}}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("empty body has no {0}")]
    EmptyBody(&'static str),

    #[error("function is not coercive: {0}")]
    NotCoercive(String),

    #[error("dim dom < n: {0}")]
    NotFullDimensional(String),

    #[error("weight membership unverified: {0}")]
    MembershipUnverified(String),

    #[error("value {value} outside range of the weight function")]
    WeightRange { value: f64 },

    #[error("isometry spec not admissible: {0}")]
    NotInPhi(String),

    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tolerance failure: {0}")]
    Tolerance(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
