//! Synthetic-population generation and seeded coverage/width studies
//! comparing all four interval methods against the reference E-value.
//!
//! Within a trial the sensitivity pairs are drawn once and shared across all
//! sample-size arms, so the Bayesian containment decisions are identical
//! across arms by construction and method comparisons are paired.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Beta, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{outcome_summary, poisson_variance, taylor_variance, asymptotic_interval};
use crate::evalue::{evalue_interval_from_delta_bounds, quantile_sorted};
use crate::linalg::{SymMat2, Vec2};
use crate::model::{IntervalMethod, MissingDataSample, SensitivityPairs};
use crate::posterior::{objective_posterior, sample_delta, subjective_posterior};
use crate::prior_fit::{fit_hyperparams, FitConfig};
use crate::seed::{derive_seed, stream};

/// Parametric stand-in for the unit-level data: log-normal outcomes with
/// clamped Beta propensities. Only the asymptotic baselines are sensitive to
/// this choice; the Bayesian methods consume the pair process alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateConfig {
    pub outcome_mean_log: f64,
    pub outcome_sd_log: f64,
    pub propensity_a: f64,
    pub propensity_b: f64,
    pub propensity_floor: f64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self {
            outcome_mean_log: 0.643,
            outcome_sd_log: 0.5,
            propensity_a: 0.35,
            propensity_b: 1.0,
            propensity_floor: 0.05,
        }
    }
}

/// Full study specification; deserializable from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    /// Units per dataset at multiplier one.
    pub n_units: usize,
    /// Sample-size multipliers, one study arm each.
    pub k_multipliers: Vec<usize>,
    /// Trial count.
    pub n_trials: usize,
    /// Benchmark group count per trial.
    pub m_groups: usize,
    /// Mean of the pair-generating law.
    pub delta_mean: Vec2,
    /// Covariance of the pair-generating law.
    pub delta_cov: SymMat2,
    /// Interval level.
    pub level: f64,
    /// Master seed; every stream derives from it.
    pub master_seed: u64,
    /// Posterior draws per trial for the Bayesian intervals.
    pub draws: usize,
    pub surrogate: SurrogateConfig,
    pub fit: FitConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_units: 2500,
            k_multipliers: vec![1, 3, 9],
            n_trials: 1000,
            m_groups: 15,
            delta_mean: Vec2::new(0.0, 0.0),
            delta_cov: SymMat2::new(0.0025, 0.0004, 0.0025),
            level: 0.95,
            master_seed: 42,
            draws: 10_000,
            surrogate: SurrogateConfig::default(),
            fit: FitConfig::default(),
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 1 {
            return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
        }
        if self.m_groups < 3 {
            return Err(Error::InvalidConfig("m_groups must be at least 3".into()));
        }
        if self.k_multipliers.is_empty() || self.k_multipliers.iter().any(|&k| k == 0) {
            return Err(Error::InvalidConfig(
                "k_multipliers must be non-empty positive integers".into(),
            ));
        }
        if !self.delta_cov.is_positive_definite() {
            return Err(Error::InvalidConfig(
                "delta_cov must be positive definite".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidLevel(self.level));
        }
        if self.n_units < 4 {
            return Err(Error::InvalidConfig("n_units must be at least 4".into()));
        }
        if self.draws < 100 {
            return Err(Error::InvalidConfig("draws must be at least 100".into()));
        }
        let s = &self.surrogate;
        if !(s.propensity_floor > 0.0 && s.propensity_floor <= 1.0)
            || !(s.propensity_a > 0.0)
            || !(s.propensity_b > 0.0)
            || !(s.outcome_sd_log > 0.0)
        {
            return Err(Error::InvalidConfig("invalid surrogate parameters".into()));
        }
        Ok(())
    }
}

/// Aggregated row of a study: one method at one sample-size multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub method: IntervalMethod,
    pub k: usize,
    pub coverage: f64,
    pub mean_width: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

/// All rows of a finished study, methods major, multipliers in config order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    pub fn row(&self, method: IntervalMethod, k: usize) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.method == method && r.k == k)
    }

    /// CSV rendering with the fixed header
    /// `method,k,coverage,mean_width,n_ok,n_failed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,k,coverage,mean_width,n_ok,n_failed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.method.label(),
                r.k,
                r.coverage,
                r.mean_width,
                r.n_ok,
                r.n_failed
            ));
        }
        out
    }
}

/// Sensitivity pairs for one trial; independent of the sample-size arm.
pub fn generate_pairs(config: &StudyConfig, trial_index: usize) -> Result<SensitivityPairs> {
    let (l11, l21, l22) = config.delta_cov.cholesky()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        config.master_seed,
        &[stream::PAIRS, trial_index as u64],
    ));
    let rows = (0..config.m_groups)
        .map(|_| {
            let z1: f64 = rng.sample(rand_distr::StandardNormal);
            let z2: f64 = rng.sample(rand_distr::StandardNormal);
            Vec2::new(
                config.delta_mean.x + l11 * z1,
                config.delta_mean.y + l21 * z1 + l22 * z2,
            )
        })
        .collect();
    SensitivityPairs::new(rows)
}

/// Unit-level surrogate data for one trial at one sample-size arm.
pub fn generate_samples(
    config: &StudyConfig,
    trial_index: usize,
    k_index: usize,
) -> Result<Vec<MissingDataSample>> {
    let k = *config
        .k_multipliers
        .get(k_index)
        .ok_or_else(|| Error::InvalidConfig(format!("no multiplier at index {k_index}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        config.master_seed,
        &[stream::UNITS, trial_index as u64, k_index as u64],
    ));
    let s = &config.surrogate;
    let outcome = LogNormal::new(s.outcome_mean_log, s.outcome_sd_log)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let propensity = Beta::new(s.propensity_a, s.propensity_b)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let n = config.n_units * k;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let y: f64 = rng.sample(outcome);
        let pi = rng.sample(propensity).clamp(s.propensity_floor, 1.0);
        let observed = rng.sample(Bernoulli::new(pi).expect("clamped propensity"));
        samples.push(MissingDataSample::new(y, observed, pi)?);
    }
    Ok(samples)
}

/// One full trial at the first sample-size arm.
pub fn generate_trial(
    config: &StudyConfig,
    trial_index: usize,
) -> Result<(Vec<MissingDataSample>, SensitivityPairs)> {
    Ok((
        generate_samples(config, trial_index, 0)?,
        generate_pairs(config, trial_index)?,
    ))
}

#[derive(Debug, Clone, Copy, Default)]
struct CellOutcome {
    contained: bool,
    width: f64,
    ok: bool,
}

/// Per-trial results: methods x arms.
struct TrialOutcome {
    cells: Vec<[CellOutcome; 4]>,
}

/// Equal-tailed draw quantiles of a posterior, reused across arms.
fn delta_bounds(draws: &mut [f64], level: f64) -> (f64, f64) {
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    (
        quantile_sorted(draws, alpha),
        quantile_sorted(draws, 1.0 - alpha),
    )
}

fn run_trial(config: &StudyConfig, trial: usize) -> TrialOutcome {
    let n_k = config.k_multipliers.len();
    let mut cells = vec![[CellOutcome::default(); 4]; n_k];

    let pairs = match generate_pairs(config, trial) {
        Ok(p) => p,
        Err(_) => return TrialOutcome { cells },
    };

    // Bayesian delta-interval endpoints are arm-independent
    let subj_bounds = fit_hyperparams(&pairs, &config.fit)
        .and_then(|fit| subjective_posterior(&pairs, &fit.hyperparams))
        .map(|post| {
            let mut draws = sample_delta(
                &post,
                config.draws,
                derive_seed(config.master_seed, &[stream::SUBJECTIVE, trial as u64]),
            );
            delta_bounds(&mut draws, config.level)
        });
    let obj_bounds = objective_posterior(&pairs).map(|post| {
        let mut draws = sample_delta(
            &post,
            config.draws,
            derive_seed(config.master_seed, &[stream::OBJECTIVE, trial as u64]),
        );
        delta_bounds(&mut draws, config.level)
    });
    let delta_hat = pairs.pooled_mean();

    for k_index in 0..n_k {
        let samples = match generate_samples(config, trial, k_index) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let summary = match outcome_summary(&samples) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let mut record = |slot: usize, iv: crate::model::EvalueInterval| {
            cells[k_index][slot] = CellOutcome {
                contained: iv.contains_reference(),
                width: iv.width(),
                ok: true,
            };
        };
        if let Ok(var) = taylor_variance(&samples) {
            if let Ok(iv) = asymptotic_interval(
                delta_hat,
                var.sqrt(),
                &summary,
                config.level,
                IntervalMethod::TaylorSeries,
            ) {
                record(0, iv);
            }
        }
        if let Ok(var) = poisson_variance(&samples) {
            if let Ok(iv) = asymptotic_interval(
                delta_hat,
                var.sqrt(),
                &summary,
                config.level,
                IntervalMethod::PoissonSampling,
            ) {
                record(1, iv);
            }
        }
        if let Ok((lo, hi)) = subj_bounds {
            if let Ok(iv) = evalue_interval_from_delta_bounds(
                lo,
                hi,
                &summary,
                config.level,
                IntervalMethod::SubjectiveBayes,
            ) {
                record(2, iv);
            }
        }
        if let Ok((lo, hi)) = obj_bounds {
            if let Ok(iv) = evalue_interval_from_delta_bounds(
                lo,
                hi,
                &summary,
                config.level,
                IntervalMethod::ObjectiveBayes,
            ) {
                record(3, iv);
            }
        }
    }
    TrialOutcome { cells }
}

/// Runs the full study. Trials execute in parallel on the ambient thread pool
/// but aggregation is serial in trial order, so the result is identical for
/// any thread count and equal to serial execution.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..config.n_trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect();

    const SLOTS: [IntervalMethod; 4] = [
        IntervalMethod::TaylorSeries,
        IntervalMethod::PoissonSampling,
        IntervalMethod::SubjectiveBayes,
        IntervalMethod::ObjectiveBayes,
    ];
    let mut rows = Vec::with_capacity(4 * config.k_multipliers.len());
    for (slot, method) in SLOTS.iter().enumerate() {
        for (k_index, &k) in config.k_multipliers.iter().enumerate() {
            let mut n_ok = 0usize;
            let mut n_contained = 0usize;
            let mut width_total = 0.0;
            for outcome in &outcomes {
                let cell = outcome.cells[k_index][slot];
                if cell.ok {
                    n_ok += 1;
                    n_contained += cell.contained as usize;
                    width_total += cell.width;
                }
            }
            let n_failed = config.n_trials - n_ok;
            if n_failed * 100 > config.n_trials {
                return Err(Error::TooManyTrialFailures {
                    failed: n_failed,
                    total: config.n_trials,
                });
            }
            rows.push(StudyRow {
                method: *method,
                k,
                coverage: if n_ok > 0 {
                    n_contained as f64 / n_ok as f64
                } else {
                    0.0
                },
                mean_width: if n_ok > 0 {
                    width_total / n_ok as f64
                } else {
                    0.0
                },
                n_ok,
                n_failed,
            });
        }
    }
    Ok(StudyResult { rows })
}
