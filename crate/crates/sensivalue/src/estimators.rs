//! Inverse-probability-weighted estimation and the two asymptotic
//! (delta-method) E-value baselines.
//!
//! The exact variance constructions behind the two baselines are not pinned
//! down by their usual citations, so this module commits to standard choices:
//! the linearization variance of the weighted mean for the Taylor route and
//! the Horvitz-Thompson variance under Poisson sampling for the other. Both
//! treat the benchmark means as fixed, so the sensitivity-estimate variance
//! equals the IPW-mean sampling variance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::evalue::{evalue_from_rr, evalue_slope_rr, rr_from_effect, standardized_effect};
use crate::linalg::Vec2;
use crate::model::{
    EvalueInterval, IntervalMethod, MissingDataSample, OutcomeSummary, SensitivityPairs,
};

/// Two noisy benchmark means for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPair {
    pub group_id: String,
    pub mu_source1: f64,
    pub mu_source2: f64,
}

impl BenchmarkPair {
    pub fn new(group_id: impl Into<String>, mu_source1: f64, mu_source2: f64) -> Result<Self> {
        if !mu_source1.is_finite() || !mu_source2.is_finite() {
            return Err(Error::NonFinitePair);
        }
        Ok(Self {
            group_id: group_id.into(),
            mu_source1,
            mu_source2,
        })
    }
}

/// IPW estimate of the population mean: `n^-1 sum r_i y_i / pi_i`.
///
/// Equals the arithmetic mean when everything is observed with unit
/// propensity.
pub fn ipw_mean(samples: &[MissingDataSample]) -> Result<f64> {
    if samples.is_empty() || !samples.iter().any(|s| s.observed) {
        return Err(Error::NoObservedOutcomes);
    }
    let total: f64 = samples
        .iter()
        .filter(|s| s.observed)
        .map(|s| s.outcome / s.propensity)
        .sum();
    Ok(total / samples.len() as f64)
}

/// Observed fraction and IPW-weighted outcome standard deviation.
///
/// The variance is weighted by the same `1/pi` weights as the mean:
/// `sum w_i (y_i - mu)^2 / sum w_i` over observed units.
pub fn outcome_summary(samples: &[MissingDataSample]) -> Result<OutcomeSummary> {
    let n_obs = samples.iter().filter(|s| s.observed).count();
    if n_obs < 2 {
        return Err(Error::TooFewObserved);
    }
    let mu = ipw_mean(samples)?;
    let mut wsum = 0.0;
    let mut wss = 0.0;
    for s in samples.iter().filter(|s| s.observed) {
        let w = 1.0 / s.propensity;
        wsum += w;
        wss += w * (s.outcome - mu) * (s.outcome - mu);
    }
    let sd_y = (wss / wsum).sqrt();
    OutcomeSummary::new(n_obs as f64 / samples.len() as f64, sd_y, samples.len())
}

/// Differences between per-group IPW means and both benchmark sources.
///
/// Row order follows `benchmarks`; the two inputs must cover exactly the same
/// group ids.
pub fn sensitivity_pairs(
    ipw_means: &[(String, f64)],
    benchmarks: &[BenchmarkPair],
) -> Result<SensitivityPairs> {
    if benchmarks.is_empty() {
        return Err(Error::NoBenchmarkGroups);
    }
    let by_id: std::collections::BTreeMap<&str, f64> = ipw_means
        .iter()
        .map(|(id, mean)| (id.as_str(), *mean))
        .collect();
    let mut missing: Vec<String> = benchmarks
        .iter()
        .filter(|b| !by_id.contains_key(b.group_id.as_str()))
        .map(|b| b.group_id.clone())
        .collect();
    let bench_ids: std::collections::BTreeSet<&str> =
        benchmarks.iter().map(|b| b.group_id.as_str()).collect();
    missing.extend(
        ipw_means
            .iter()
            .filter(|(id, _)| !bench_ids.contains(id.as_str()))
            .map(|(id, _)| id.clone()),
    );
    if !missing.is_empty() {
        return Err(Error::GroupMismatch(missing));
    }
    let rows = benchmarks
        .iter()
        .map(|b| {
            let mu = by_id[b.group_id.as_str()];
            Vec2::new(mu - b.mu_source1, mu - b.mu_source2)
        })
        .collect();
    SensitivityPairs::new(rows)
}

/// Linearization variance of the IPW mean: sample variance of the weighted
/// contributions `r_i y_i / pi_i` divided by `n`.
pub fn taylor_variance(samples: &[MissingDataSample]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewObserved);
    }
    let n = samples.len() as f64;
    let mean = ipw_mean(samples)?;
    let ss: f64 = samples
        .iter()
        .map(|s| {
            let z = if s.observed {
                s.outcome / s.propensity
            } else {
                0.0
            };
            (z - mean) * (z - mean)
        })
        .sum();
    Ok(ss / (n - 1.0) / n)
}

/// Horvitz-Thompson variance under Poisson sampling:
/// `n^-2 sum r_i (1 - pi_i) (y_i / pi_i)^2`.
pub fn poisson_variance(samples: &[MissingDataSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::NoObservedOutcomes);
    }
    let n = samples.len() as f64;
    let total: f64 = samples
        .iter()
        .filter(|s| s.observed)
        .map(|s| {
            let w = s.outcome / s.propensity;
            (1.0 - s.propensity) * w * w
        })
        .sum();
    Ok(total / (n * n))
}

/// Delta-method E-value interval, symmetric on the E-value scale and clamped
/// below at one.
///
/// The point estimate is propagated through the chain
/// effect -> risk ratio -> E-value with the chain-rule slope evaluated at the
/// point risk ratio. A point risk ratio of exactly one has a singular slope;
/// the interval then falls back to mapping the one-sided effect bound through
/// the E-value transform and flags itself.
pub fn asymptotic_interval(
    delta_hat: f64,
    sd_delta: f64,
    summary: &OutcomeSummary,
    level: f64,
    method: IntervalMethod,
) -> Result<EvalueInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    if !(sd_delta >= 0.0) || !sd_delta.is_finite() {
        return Err(Error::InvalidScale(sd_delta));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let c = (1.0 - summary.p_obs) / summary.sd_y;
    let rr = rr_from_effect(standardized_effect(delta_hat, summary));
    let v_hat = evalue_from_rr(rr)?;
    if rr == 1.0 {
        // singular derivative: map the one-sided effect bound directly
        let upper = evalue_from_rr(rr_from_effect(c * z * sd_delta))?;
        return EvalueInterval::with_fallback(1.0, upper.max(1.0), method, level, true);
    }
    let sd_v = evalue_slope_rr(rr) * 0.91 * c * sd_delta;
    let lower = (v_hat - z * sd_v).max(1.0);
    let upper = (v_hat + z * sd_v).max(lower);
    EvalueInterval::new(lower, upper, method, level)
}

/// Taylor-series confidence interval for the E-value of `delta_hat`.
pub fn taylor_series_interval(
    samples: &[MissingDataSample],
    delta_hat: f64,
    summary: &OutcomeSummary,
    level: f64,
) -> Result<EvalueInterval> {
    let var = taylor_variance(samples)?;
    asymptotic_interval(
        delta_hat,
        var.sqrt(),
        summary,
        level,
        IntervalMethod::TaylorSeries,
    )
}

/// Poisson-sampling confidence interval for the E-value of `delta_hat`.
pub fn poisson_sampling_interval(
    samples: &[MissingDataSample],
    delta_hat: f64,
    summary: &OutcomeSummary,
    level: f64,
) -> Result<EvalueInterval> {
    let var = poisson_variance(samples)?;
    asymptotic_interval(
        delta_hat,
        var.sqrt(),
        summary,
        level,
        IntervalMethod::PoissonSampling,
    )
}
