//! A small seeded coverage/width study comparing all four interval methods
//! against the reference E-value of one.
//!
//! ```bash
//! cargo run --release --example coverage_study
//! ```

use sensivalue::sim::{run_study, StudyConfig};

fn main() -> sensivalue::Result<()> {
    let config = StudyConfig {
        n_trials: 250,
        n_units: 1000,
        k_multipliers: vec![1, 3, 9],
        draws: 5_000,
        ..StudyConfig::default()
    };
    eprintln!(
        "running {} trials, {} groups per trial, arms {:?}...",
        config.n_trials, config.m_groups, config.k_multipliers
    );
    let result = run_study(&config)?;
    print!("{}", result.to_csv());

    let subj = result
        .row(sensivalue::model::IntervalMethod::SubjectiveBayes, 1)
        .unwrap();
    let taylor = result
        .row(sensivalue::model::IntervalMethod::TaylorSeries, 1)
        .unwrap();
    eprintln!(
        "\nat the base sample size the asymptotic interval is {:.0}x wider than the Bayesian one",
        taylor.mean_width / subj.mean_width
    );
    Ok(())
}
