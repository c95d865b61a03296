//! The full interval pipeline on one synthetic dataset: IPW estimation,
//! benchmark discrepancies, both posteriors and all four E-value intervals.
//!
//! ```bash
//! cargo run --example posterior_intervals
//! ```

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, LogNormal, StandardNormal};

use sensivalue::estimators::{
    ipw_mean, outcome_summary, poisson_sampling_interval, sensitivity_pairs,
    taylor_series_interval, BenchmarkPair,
};
use sensivalue::evalue::delta_draws_evalue_interval;
use sensivalue::model::{IntervalMethod, MissingDataSample};
use sensivalue::posterior::{objective_posterior, sample_delta, subjective_posterior};
use sensivalue::prior_fit::{fit_hyperparams, FitConfig};

fn main() -> sensivalue::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // 15 groups of unit-level data with missingness, plus two noisy benchmark
    // means per group
    let outcome = LogNormal::new(0.6, 0.5).unwrap();
    let mut means = Vec::new();
    let mut benchmarks = Vec::new();
    let mut pooled_units: Vec<MissingDataSample> = Vec::new();
    for g in 0..15 {
        let name = format!("group_{g:02}");
        let units: Vec<MissingDataSample> = (0..800)
            .map(|_| {
                let pi = rng.gen_range(0.25..0.95);
                let y: f64 = rng.sample(outcome);
                let observed = rng.sample(Bernoulli::new(pi).unwrap());
                MissingDataSample::new(y, observed, pi).unwrap()
            })
            .collect();
        let mu = ipw_mean(&units)?;
        let mut noise = || 0.05 * rng.sample::<f64, _>(StandardNormal);
        benchmarks.push(BenchmarkPair::new(name.clone(), mu - noise(), mu - noise())?);
        means.push((name, mu));
        pooled_units.extend(units);
    }

    let pairs = sensitivity_pairs(&means, &benchmarks)?;
    let summary = outcome_summary(&pooled_units)?;
    println!(
        "pooled data: n = {}, observed fraction = {:.3}, sd(Y) = {:.3}",
        summary.n, summary.p_obs, summary.sd_y
    );

    // posteriors for the sensitivity parameter
    let fit = fit_hyperparams(&pairs, &FitConfig::default())?;
    let subjective = subjective_posterior(&pairs, &fit.hyperparams)?;
    let objective = objective_posterior(&pairs)?;
    println!(
        "subjective posterior: t(location {:+.5}, scale {:.5}, df {:.2})",
        subjective.location, subjective.scale, subjective.df
    );
    println!(
        "objective posterior:  t(location {:+.5}, scale {:.5}, df {:.2})",
        objective.location, objective.scale, objective.df
    );

    // E-value intervals: Bayesian ones map posterior-draw quantiles of the
    // sensitivity parameter through the E-value transform
    let level = 0.95;
    let draws = 100_000;
    let subj_iv = delta_draws_evalue_interval(
        &sample_delta(&subjective, draws, 1),
        &summary,
        level,
        IntervalMethod::SubjectiveBayes,
    )?;
    let obj_iv = delta_draws_evalue_interval(
        &sample_delta(&objective, draws, 2),
        &summary,
        level,
        IntervalMethod::ObjectiveBayes,
    )?;

    // asymptotic baselines at the pooled discrepancy estimate
    let delta_hat = pairs.pooled_mean();
    let taylor = taylor_series_interval(&pooled_units, delta_hat, &summary, level)?;
    let poisson = poisson_sampling_interval(&pooled_units, delta_hat, &summary, level)?;

    println!("\n95% E-value intervals:");
    for iv in [taylor, poisson, subj_iv, obj_iv] {
        println!(
            "  {:<12} ({:.4}, {:.4})  width {:.4}",
            iv.method.label(),
            iv.lower,
            iv.upper,
            iv.width()
        );
    }
    Ok(())
}
