//! Maps sensitivity-parameter values to standardized effects, risk ratios and
//! E-values, and turns posterior draws into E-value credible intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EvalueInterval, GeneralizedT, IntervalMethod, OutcomeSummary};
use crate::posterior::sample_delta;

/// Standardized effect of a sensitivity-parameter value:
/// `(1 - p_obs) * delta / sd_y`.
pub fn standardized_effect(delta: f64, summary: &OutcomeSummary) -> f64 {
    (1.0 - summary.p_obs) * delta / summary.sd_y
}

/// Approximate risk ratio of a standardized mean difference: `exp(0.91 mu)`.
pub fn rr_from_effect(mu_missing: f64) -> f64 {
    (0.91 * mu_missing).exp()
}

/// E-value of a risk ratio: `rr + sqrt(rr (rr - 1))` after folding `rr < 1`
/// through its reciprocal. Always >= 1, and exactly 1 at `rr = 1`.
pub fn evalue_from_rr(rr: f64) -> Result<f64> {
    if !(rr > 0.0) || !rr.is_finite() {
        return Err(Error::InvalidRiskRatio(rr));
    }
    let r = if rr < 1.0 { 1.0 / rr } else { rr };
    Ok(r + (r * (r - 1.0)).sqrt())
}

/// Magnitude of `dV/d(delta)` divided by `0.91 * (1-p)/sd_y`, i.e. the slope
/// of the E-value map against the risk-ratio chain at `rr`.
///
/// Singular at `rr = 1` (square-root cusp); callers handle that case.
pub fn evalue_slope_rr(rr: f64) -> f64 {
    let r = if rr < 1.0 { 1.0 / rr } else { rr };
    let g = 1.0 + (2.0 * r - 1.0) / (2.0 * (r * r - r).sqrt());
    g * r
}

/// Posterior E-value draws together with the inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluePosterior {
    samples: Vec<f64>,
    pub summary: OutcomeSummary,
    pub n_draws: usize,
    pub seed: u64,
}

impl EvaluePosterior {
    /// All samples must be >= 1 (the E-value scale starts at its reference).
    pub fn new(samples: Vec<f64>, summary: OutcomeSummary, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if samples.iter().any(|&v| !(v >= 1.0) || !v.is_finite()) {
            return Err(Error::InvalidIntervalBounds(
                samples.iter().cloned().fold(f64::INFINITY, f64::min),
                f64::NAN,
            ));
        }
        let n_draws = samples.len();
        Ok(Self {
            samples,
            summary,
            n_draws,
            seed,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Simulates the posterior distribution of the E-value by composing
/// draw -> standardized effect -> risk ratio -> E-value per draw.
///
/// Deterministic given `seed`. Fewer than 100 draws is an error; fewer than
/// 1000 logs a warning since interval quantiles get noisy.
pub fn posterior_evalue(
    post: &GeneralizedT,
    summary: &OutcomeSummary,
    n_draws: usize,
    seed: u64,
) -> Result<EvaluePosterior> {
    if n_draws < 100 {
        return Err(Error::TooFewDraws {
            min: 100,
            got: n_draws,
        });
    }
    if n_draws < 1000 {
        log::warn!("posterior_evalue called with {n_draws} draws; intervals want >= 1000");
    }
    let deltas = sample_delta(post, n_draws, seed);
    let samples = deltas
        .iter()
        .map(|&d| evalue_from_rr(rr_from_effect(standardized_effect(d, summary))))
        .collect::<Result<Vec<f64>>>()?;
    EvaluePosterior::new(samples, *summary, seed)
}

/// Type-7 quantile (linear interpolation between order statistics) of an
/// already sorted slice.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    } else {
        sorted[n - 1]
    }
}

/// Equal-tailed credible interval of the simulated E-value distribution,
/// with the lower endpoint clamped at the reference value one.
pub fn credible_interval(
    ep: &EvaluePosterior,
    level: f64,
    method: IntervalMethod,
) -> Result<EvalueInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let mut sorted = ep.samples().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    let lower = quantile_sorted(&sorted, alpha).max(1.0);
    let upper = quantile_sorted(&sorted, 1.0 - alpha).max(lower);
    EvalueInterval::new(lower, upper, method, level)
}

/// E-value interval induced by the equal-tailed posterior interval of the
/// sensitivity parameter itself.
///
/// Both signed endpoints are pushed through the E-value map; when they
/// straddle zero the image covers the reference value, so the lower endpoint
/// collapses to one. This is the construction behind the reported tables: a
/// posterior that cannot rule out a zero sensitivity parameter yields an
/// interval anchored at one.
pub fn delta_draws_evalue_interval(
    delta_draws: &[f64],
    summary: &OutcomeSummary,
    level: f64,
    method: IntervalMethod,
) -> Result<EvalueInterval> {
    if delta_draws.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let mut sorted = delta_draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    let d_lo = quantile_sorted(&sorted, alpha);
    let d_hi = quantile_sorted(&sorted, 1.0 - alpha);
    evalue_interval_from_delta_bounds(d_lo, d_hi, summary, level, method)
}

/// Image of a sensitivity-parameter interval `[d_lo, d_hi]` under the E-value
/// map, collapsing the lower endpoint to one when the interval straddles zero.
pub fn evalue_interval_from_delta_bounds(
    d_lo: f64,
    d_hi: f64,
    summary: &OutcomeSummary,
    level: f64,
    method: IntervalMethod,
) -> Result<EvalueInterval> {
    let v_lo = evalue_from_rr(rr_from_effect(standardized_effect(d_lo, summary)))?;
    let v_hi = evalue_from_rr(rr_from_effect(standardized_effect(d_hi, summary)))?;
    let upper = v_lo.max(v_hi);
    let lower = if d_lo <= 0.0 && d_hi >= 0.0 {
        1.0
    } else {
        v_lo.min(v_hi)
    };
    EvalueInterval::new(lower, upper.max(lower), method, level)
}
