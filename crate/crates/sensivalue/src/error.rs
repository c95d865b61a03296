//! Crate-wide error type; each variant names the violated invariant.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("propensity must lie in (0, 1], got {0}")]
    InvalidPropensity(f64),
    #[error("outcome value must be finite, got {0}")]
    NonFiniteOutcome(f64),
    #[error("no observed outcomes")]
    NoObservedOutcomes,
    #[error("fewer than two observed outcomes")]
    TooFewObserved,
    #[error("degenerate outcome variance")]
    DegenerateOutcomeVariance,
    #[error("observed fraction must lie strictly in (0, 1), got {0}")]
    ObservedFractionOutOfRange(f64),
    #[error("sensitivity pairs need at least 3 rows, got {0}")]
    TooFewGroups(usize),
    #[error("sensitivity pair rows must be finite")]
    NonFinitePair,
    #[error("benchmark groups missing from the other input: {0:?}")]
    GroupMismatch(Vec<String>),
    #[error("no benchmark groups")]
    NoBenchmarkGroups,
    #[error("scale matrix must be symmetric positive definite")]
    NotPositiveDefinite,
    #[error("matrix determinant below floor ({0:e}); singular matrix")]
    SingularMatrix(f64),
    #[error("degenerate scatter")]
    DegenerateScatter,
    #[error("degrees of freedom must exceed 1, got {0}")]
    InvalidDegreesOfFreedom(f64),
    #[error("scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("bivariate gamma function requires argument > 1/2, got {0}")]
    Gamma2Pole(f64),
    #[error("interval level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("interval bounds must satisfy 1 <= lower <= upper, got ({0}, {1})")]
    InvalidIntervalBounds(f64, f64),
    #[error("risk ratio must be positive, got {0}")]
    InvalidRiskRatio(f64),
    #[error("posterior kernel not normalizable")]
    KernelNotNormalizable,
    #[error("need at least {min} posterior draws, got {got}")]
    TooFewDraws { min: usize, got: usize },
    #[error("empty sample set")]
    EmptySamples,
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("gamma-tail density requires a positive effect direction, got eta = {0}")]
    NonPositiveEffect(f64),
    #[error("density support is v > 1, got {0}")]
    OutsideSupport(f64),
    #[error("quantile root-finding failed to converge; bracket [{lo}, {hi}], target {target}")]
    QuantileBracket { lo: f64, hi: f64, target: f64 },
    #[error("optimizer did not converge after {iterations} iterations; last objective {objective}")]
    OptimizerDiverged { iterations: usize, objective: f64 },
    #[error("feasible interval for the prior location is empty")]
    EmptyFeasibleInterval,
    #[error("study failure rate {failed}/{total} exceeds 1%")]
    TooManyTrialFailures { failed: usize, total: usize },
    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}:{line}: {message}")]
    DataFormat {
        path: String,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}
