//! Error type shared across the crate.
//!
//! Every failure carries a stable machine-readable code (see [`Error::code`])
//! so the command-line frontend can map errors onto its exit-code contract:
//! `0` success, `1` usage/configuration, `2` violated mathematical hypothesis,
//! `3` exhausted numerical budget (enumeration caps, unreachable tolerances,
//! starved samplers).

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid field spec: {0}")]
    InvalidFieldSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rank: {0}")]
    InvalidRank(String),

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("operands live over different number fields")]
    FieldMismatch,

    #[error("invalid scale factor {0}: must be positive and finite")]
    InvalidScale(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tolerance must be positive and finite, got {0}")]
    NonPositiveTolerance(f64),

    #[error("sublattice generators span rank zero")]
    EmptySublattice,

    #[error("generators do not span an O_F-stable sublattice: {0}")]
    NotModuleStable(String),

    #[error("enumeration too large: {count} lattice points exceed the cap {cap}")]
    EnumerationTooLarge { count: u64, cap: u64 },

    #[error("requested tolerance unreachable: {0}")]
    ToleranceUnreachable(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("sampler starved: {0}")]
    SamplingStarved(String),

    #[error("argument {0} hits a pole of the completed zeta")]
    PoleArgument(String),

    #[error("extrapolation did not converge: {0}")]
    NonConvergent(String),

    #[error("integer overflow in exact lattice arithmetic")]
    IntegerOverflow,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable error code, included in JSON error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidFieldSpec(_) => "invalid-field-spec",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidRank(_) => "invalid-rank",
            Error::DegenerateBasis(_) => "degenerate-basis",
            Error::FieldMismatch => "field-mismatch",
            Error::InvalidScale(_) => "invalid-scale",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::NonPositiveTolerance(_) => "non-positive-tolerance",
            Error::EmptySublattice => "empty-sublattice",
            Error::NotModuleStable(_) => "not-module-stable",
            Error::EnumerationTooLarge { .. } => "enumeration-too-large",
            Error::ToleranceUnreachable(_) => "tolerance-unreachable",
            Error::HypothesisViolated(_) => "hypothesis-violated",
            Error::SamplingStarved(_) => "sampling-starved",
            Error::PoleArgument(_) => "pole-argument",
            Error::NonConvergent(_) => "non-convergent",
            Error::IntegerOverflow => "integer-overflow",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code for the CLI: 1 usage, 2 hypothesis, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HypothesisViolated(_) => 2,
            Error::EnumerationTooLarge { .. }
            | Error::ToleranceUnreachable(_)
            | Error::SamplingStarved(_)
            | Error::NonConvergent(_) => 3,
            _ => 1,
        }
    }
}
