use thiserror::Error;

/// Errors raised while building models or computing leakage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("alphabet mismatch in {0}")]
    AlphabetMismatch(&'static str),

    #[error("empty alphabet")]
    EmptyAlphabet,

    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum} with truncation deficit {deficit}; expected 1 within 1e-12")]
    NotNormalized { sum: f64, deficit: f64 },

    #[error("truncation deficit {0} exceeds the 1e-9 limit")]
    TruncationTooCoarse(f64),

    #[error("unsupported law: {0}")]
    UnsupportedLaw(String),

    #[error("capacity exceeded: {what} is {requested}, limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("outcome `{0}` has zero probability")]
    ZeroProbabilityOutcome(String),

    #[error("posterior is not absolutely continuous w.r.t. the prior (witness `{witness}`)")]
    NotAbsolutelyContinuous { witness: String },

    #[error("definition error: {0}")]
    Definition(String),

    #[error("density of the outcome y = {0} is zero; leakage is undefined")]
    UndefinedOutcome(f64),

    #[error("model error: {0}")]
    Model(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that come from an enumeration cap.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
