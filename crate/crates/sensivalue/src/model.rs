//! Shared domain types and their validation; no algorithms live here.
//!
//! Every constructor rejects invariant violations with an error naming the
//! violated invariant. All types are immutable plain data and safe to share
//! across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SymMat2, Vec2};

/// One unit of observation: outcome, missingness flag and observation propensity.
///
/// The outcome is carried even when unobserved but is never read by any
/// estimator in that case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissingDataSample {
    pub outcome: f64,
    pub observed: bool,
    pub propensity: f64,
}

impl MissingDataSample {
    pub fn new(outcome: f64, observed: bool, propensity: f64) -> Result<Self> {
        if !(propensity > 0.0 && propensity <= 1.0) {
            return Err(Error::InvalidPropensity(propensity));
        }
        if !outcome.is_finite() {
            return Err(Error::NonFiniteOutcome(outcome));
        }
        Ok(Self {
            outcome,
            observed,
            propensity,
        })
    }
}

/// Two-source sensitivity-parameter estimates, one row per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPairs {
    rows: Vec<Vec2>,
}

impl SensitivityPairs {
    /// Requires at least three finite rows so the scatter matrix is generically
    /// invertible and the flat-prior posterior has at least two degrees of freedom.
    pub fn new(rows: Vec<Vec2>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::TooFewGroups(rows.len()));
        }
        if rows.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinitePair);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec2] {
        &self.rows
    }

    /// Group count `m`.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Mean of all `2m` entries; the default asymptotic point estimate.
    pub fn pooled_mean(&self) -> f64 {
        let total: f64 = self.rows.iter().map(|r| r.sum()).sum();
        total / (2.0 * self.rows.len() as f64)
    }
}

/// Normal-Inverse-Wishart prior hyperparameters `(delta0, Psi, nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NiwHyperparams {
    pub delta0: f64,
    pub psi: SymMat2,
    pub nu: f64,
}

impl NiwHyperparams {
    /// `psi` must be SPD and `nu > 1` so the bivariate gamma in the
    /// normalizing constant stays finite.
    pub fn new(delta0: f64, psi: SymMat2, nu: f64) -> Result<Self> {
        if !psi.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        if !(nu > 1.0) || !nu.is_finite() {
            return Err(Error::InvalidDegreesOfFreedom(nu));
        }
        if !delta0.is_finite() {
            return Err(Error::NonFiniteOutcome(delta0));
        }
        Ok(Self { delta0, psi, nu })
    }
}

/// Location-scale Student-t distribution; the marginal posterior family of the
/// sensitivity parameter under both prior choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedT {
    pub location: f64,
    pub scale: f64,
    pub df: f64,
}

impl GeneralizedT {
    pub fn new(location: f64, scale: f64, df: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidScale(scale));
        }
        if !(df > 0.0) || !df.is_finite() {
            return Err(Error::InvalidDegreesOfFreedom(df));
        }
        if !location.is_finite() {
            return Err(Error::NonFiniteOutcome(location));
        }
        Ok(Self {
            location,
            scale,
            df,
        })
    }
}

/// Dataset-level facts needed to put a sensitivity parameter on the
/// standardized effect scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    /// Observed fraction, strictly inside (0, 1).
    pub p_obs: f64,
    /// Outcome standard deviation (weighted, over observed units).
    pub sd_y: f64,
    /// Total sample count.
    pub n: usize,
}

impl OutcomeSummary {
    pub fn new(p_obs: f64, sd_y: f64, n: usize) -> Result<Self> {
        if !(sd_y > 0.0) || !sd_y.is_finite() {
            return Err(Error::DegenerateOutcomeVariance);
        }
        if !(p_obs > 0.0 && p_obs < 1.0) {
            return Err(Error::ObservedFractionOutOfRange(p_obs));
        }
        Ok(Self { p_obs, sd_y, n })
    }
}

/// Interval-producing method, one per reported column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalMethod {
    #[serde(rename = "taylor")]
    TaylorSeries,
    #[serde(rename = "poisson")]
    PoissonSampling,
    #[serde(rename = "subjective")]
    SubjectiveBayes,
    #[serde(rename = "objective")]
    ObjectiveBayes,
}

impl IntervalMethod {
    pub const ALL: [IntervalMethod; 4] = [
        IntervalMethod::TaylorSeries,
        IntervalMethod::PoissonSampling,
        IntervalMethod::SubjectiveBayes,
        IntervalMethod::ObjectiveBayes,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IntervalMethod::TaylorSeries => "taylor",
            IntervalMethod::PoissonSampling => "poisson",
            IntervalMethod::SubjectiveBayes => "subjective",
            IntervalMethod::ObjectiveBayes => "objective",
        }
    }
}

/// An E-value uncertainty interval: the unit of all reported output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalueInterval {
    pub lower: f64,
    pub upper: f64,
    pub method: IntervalMethod,
    pub level: f64,
    /// Set when the delta-method derivative was singular (point risk ratio
    /// exactly one) and the one-sided fallback produced the interval.
    #[serde(default)]
    pub fallback: bool,
}

impl EvalueInterval {
    pub fn new(lower: f64, upper: f64, method: IntervalMethod, level: f64) -> Result<Self> {
        Self::with_fallback(lower, upper, method, level, false)
    }

    pub fn with_fallback(
        lower: f64,
        upper: f64,
        method: IntervalMethod,
        level: f64,
        fallback: bool,
    ) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidLevel(level));
        }
        if !(1.0 <= lower && lower <= upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidIntervalBounds(lower, upper));
        }
        Ok(Self {
            lower,
            upper,
            method,
            level,
            fallback,
        })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Whether the interval covers the reference E-value of one.
    pub fn contains_reference(&self) -> bool {
        self.lower <= 1.0 && 1.0 <= self.upper
    }
}

/// Parameters of a closed-form E-value density.
///
/// The risk ratio is log-normal when the standardized effect is (approximately)
/// normal, and log-gamma when the outcome scale follows an inverse-gamma law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EvalueDensityParams {
    LogNormalRr { mu_rr: f64, sigma_rr: f64 },
    LogGammaRr { alpha: f64, beta_v: f64 },
}

impl EvalueDensityParams {
    pub fn log_normal(mu_rr: f64, sigma_rr: f64) -> Result<Self> {
        if !(sigma_rr > 0.0) || !sigma_rr.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "sigma_rr",
                value: sigma_rr,
            });
        }
        if !mu_rr.is_finite() {
            return Err(Error::NonFiniteOutcome(mu_rr));
        }
        Ok(Self::LogNormalRr { mu_rr, sigma_rr })
    }

    pub fn log_gamma(alpha: f64, beta_v: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !(beta_v > 0.0) || !beta_v.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "beta_v",
                value: beta_v,
            });
        }
        Ok(Self::LogGammaRr { alpha, beta_v })
    }
}
