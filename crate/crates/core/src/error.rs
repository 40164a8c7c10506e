use num_bigint::BigInt;
use thiserror::Error;

/// Every failure the engine can report. Domain errors are typed so the CLI
/// can map them onto stable JSON objects.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("not a homaloidal type: {0}")]
    NotHomaloidal(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid marked-system state: {0}")]
    InvalidState(String),
    #[error("wrong surface: expected {expected}, found {found}")]
    WrongSurface { expected: String, found: String },
    #[error("point {0} is not a proper (root) point")]
    NotProperPoint(String),
    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("special position: {0}")]
    SpecialPosition(String),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("composition is identically zero")]
    DegenerateComposition,
    #[error("non-rational base point: {0}")]
    NonRationalBasePoint(String),
    #[error(
        "base points incomplete (infinitely near or irrational points): \
         sum of squares short by {square_residual}, sum short by {linear_residual}"
    )]
    InfinitelyNearOrIrrational {
        square_residual: BigInt,
        linear_residual: BigInt,
    },
    #[error("corpus generation failed: {0}")]
    CorpusGenerationFailed(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
            Error::InvalidCluster(_) => "InvalidCluster",
            Error::NotHomaloidal(_) => "NotHomaloidal",
            Error::NotApplicable(_) => "NotApplicable",
            Error::InvalidState(_) => "InvalidState",
            Error::WrongSurface { .. } => "WrongSurface",
            Error::NotProperPoint(_) => "NotProperPoint",
            Error::InvalidContraction(_) => "InvalidContraction",
            Error::SpecialPosition(_) => "SpecialPosition",
            Error::InvalidComposition(_) => "InvalidComposition",
            Error::InvalidTrace(_) => "InvalidTrace",
            Error::InternalInvariantViolation(_) => "InternalInvariantViolation",
            Error::DegenerateComposition => "DegenerateComposition",
            Error::NonRationalBasePoint(_) => "NonRationalBasePoint",
            Error::InfinitelyNearOrIrrational { .. } => "InfinitelyNearOrIrrational",
            Error::CorpusGenerationFailed(_) => "CorpusGenerationFailed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
