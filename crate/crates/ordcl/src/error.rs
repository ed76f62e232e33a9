//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, fitting and the study engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A link function was evaluated at a non-finite predictor value.
    #[error("non-finite linear predictor value: {0}")]
    NonFiniteEta(f64),

    /// Inconsistent dimensions between data, specification or parameters.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Invalid input data (negative counts, empty data, bad labels, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Fewer than two response categories carry observations.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// The stacked design matrix does not have full column rank.
    #[error("design is rank deficient: column '{column}' is linearly dependent on the others")]
    RankDeficient { column: String },

    /// A parameter vector violates the predictor ordering at a data row.
    #[error("invalid parameter: predictor ordering violated at row {row}, category {category}")]
    InvalidParameter { row: usize, category: usize },

    /// A matrix required to be invertible is numerically singular.
    #[error("singular information matrix: {0}")]
    SingularInformation(String),

    /// Fisher scoring failed to converge within the iteration budget.
    #[error("fitting did not converge after {iterations} iterations (max |score| = {max_score:.3e})")]
    NonConvergence { iterations: usize, max_score: f64 },

    /// The requested estimator is undefined for this fit (e.g. bias
    /// correction at a boundary maximum likelihood estimate).
    #[error("estimator undefined: {0}")]
    UndefinedEstimator(String),

    /// A study configuration is unusable.
    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
