//! Posterior simulation of the E-value itself: draw the sensitivity
//! parameter, push each draw through the E-value map, and summarize the
//! folded distribution.
//!
//! ```bash
//! cargo run --example evalue_samples
//! ```

use sensivalue::evalue::{credible_interval, posterior_evalue};
use sensivalue::model::{GeneralizedT, IntervalMethod, OutcomeSummary};

fn main() -> sensivalue::Result<()> {
    // posterior of the sensitivity parameter and facts about the outcome data
    let posterior = GeneralizedT::new(0.004, 0.011, 14.0)?;
    let summary = OutcomeSummary::new(0.35, 1.1, 2500)?;

    let ep = posterior_evalue(&posterior, &summary, 200_000, 42)?;
    let samples = ep.samples();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let above = samples.iter().filter(|&&v| v > 1.1).count() as f64 / samples.len() as f64;
    println!("E-value posterior from {} draws:", ep.n_draws);
    println!("  mean             = {mean:.4}");
    println!("  P(V > 1.1)       = {above:.4}");

    for level in [0.5, 0.9, 0.95, 0.99] {
        let iv = credible_interval(&ep, level, IntervalMethod::SubjectiveBayes)?;
        println!(
            "  {:>4.0}% equal-tail = ({:.4}, {:.4})",
            level * 100.0,
            iv.lower,
            iv.upper
        );
    }
    Ok(())
}
