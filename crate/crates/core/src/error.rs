use thiserror::Error;

/// Failures raised by constructors and operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("density is not log-concave: {0}")]
    NotLogConcave(String),
    #[error("truncation failure: {0}")]
    Truncation(String),
    #[error("not an integrated survival function: {0}")]
    InvalidIntegratedSurvival(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("family constraint violated: {0}")]
    FamilyConstraint(String),
    #[error("kernel is not TP2: {0}")]
    KernelNotTp2(String),
    #[error("moment bound violated: {0}")]
    MomentBound(String),
    #[error("points do not form a chain: {0}")]
    NotAChain(String),
    #[error("barrier epigraphs are not nested: {0}")]
    NotNested(String),
    #[error("{exhausted} of {total} paths exhausted the step budget")]
    PathExhaustion { exhausted: usize, total: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
