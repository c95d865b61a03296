//! Fit Normal-Inverse-Wishart prior hyperparameters to noisy benchmark
//! discrepancies by marginal likelihood.
//!
//! ```bash
//! cargo run --example fit_prior
//! ```

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sensivalue::linalg::Vec2;
use sensivalue::model::SensitivityPairs;
use sensivalue::prior_fit::{fit_hyperparams, neg_log_marginal, FitConfig};

fn main() -> sensivalue::Result<()> {
    // two noisy benchmark discrepancies per group, 15 groups, drawn around a
    // true common sensitivity parameter of 0.02
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rows: Vec<Vec2> = (0..15)
        .map(|_| {
            let mut noise = || 0.05 * rng.sample::<f64, _>(StandardNormal);
            Vec2::new(0.02 + noise(), 0.02 + noise())
        })
        .collect();
    let pairs = SensitivityPairs::new(rows)?;

    let fit = fit_hyperparams(&pairs, &FitConfig::default())?;
    let h = fit.hyperparams;
    println!("fitted prior location  delta0 = {:+.5}", h.delta0);
    println!("fitted scale matrix    psi    = [[{:.6}, {:.6}], [.., {:.6}]]", h.psi.a, h.psi.b, h.psi.d);
    println!("fitted df              nu     = {:.4}", h.nu);
    println!("objective at optimum          = {:.6}", fit.objective);
    println!("location Mahalanobis distance = {:.4} (bound {:.4})", fit.mahalanobis_sq, 16.0 / 15.0);
    println!("scale-direction convexity     = {}", fit.psi_convex_at_optimum);

    // the marginal-likelihood objective is what the fit minimized
    let check = neg_log_marginal(&h, &pairs)?;
    println!("objective recomputed          = {check:.6}");
    Ok(())
}
