//! Bayesian sensitivity analysis for missing-outcome data on the E-value scale.
//!
//! Given unit-level outcomes with missingness indicators and propensity scores,
//! plus noisy external benchmarks of the population mean, this crate
//!
//! * estimates the population mean by inverse probability weighting,
//! * treats benchmark discrepancies as noisy observations of a sensitivity
//!   parameter and fits a Normal-Inverse-Wishart prior to them by marginal
//!   likelihood,
//! * derives generalized Student-t posteriors for the sensitivity parameter
//!   under both the fitted prior and an independent Jeffreys prior,
//! * converts posterior draws into E-value credible intervals, alongside two
//!   asymptotic (delta-method) baselines,
//! * evaluates closed-form E-value densities for three approximation regimes,
//! * and runs seeded Monte Carlo coverage studies comparing all four interval
//!   methods.
//!
//! The `analyze`, `simulate` and `density` subcommands of the bundled
//! `sensivalue` binary are thin wrappers over [`report`]; the `examples/`
//! directory exercises each capability as a library.

pub mod density;
pub mod error;
pub mod estimators;
pub mod evalue;
pub mod linalg;
pub mod model;
pub mod posterior;
pub mod prior_fit;
pub mod quad;
pub mod report;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{SymMat2, Vec2};
pub use model::{
    EvalueDensityParams, EvalueInterval, GeneralizedT, IntervalMethod, MissingDataSample,
    NiwHyperparams, OutcomeSummary, SensitivityPairs,
};
