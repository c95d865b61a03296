//! Empirical-Bayes fitting of the Normal-Inverse-Wishart prior by marginal
//! likelihood: conjugate updates, the negative-log objective, the closed-form
//! scale-matrix optimum, a curvature-knee rule for the degrees of freedom and
//! a bounded 1-D search for the prior location.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{SymMat2, Vec2, DET_FLOOR};
use crate::model::{NiwHyperparams, SensitivityPairs};

/// Row mean and centered scatter of the sensitivity pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterStats {
    pub delta_bar: Vec2,
    pub s_matrix: SymMat2,
}

/// Conjugate posterior hyperparameters together with the sufficient statistics
/// that produced them. `nu_tilde = nu + m` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateUpdate {
    pub delta_tilde: f64,
    pub psi_tilde: SymMat2,
    pub nu_tilde: f64,
    pub s_matrix: SymMat2,
    pub delta_bar: Vec2,
}

/// Row mean `delta_bar` and scatter `S = sum (d_j - delta_bar)(d_j - delta_bar)'`.
///
/// The scatter is not divided by `m`. All rows identical makes `S` singular
/// and is rejected.
pub fn scatter_stats(pairs: &SensitivityPairs) -> Result<ScatterStats> {
    let m = pairs.m() as f64;
    let mut mean = Vec2::new(0.0, 0.0);
    for row in pairs.rows() {
        mean = mean.add(*row);
    }
    let delta_bar = mean.scale(1.0 / m);
    let mut s = SymMat2::zero();
    for row in pairs.rows() {
        s = s.add(row.sub(delta_bar).outer());
    }
    if !(s.det() >= DET_FLOOR) {
        return Err(Error::DegenerateScatter);
    }
    Ok(ScatterStats {
        delta_bar,
        s_matrix: s,
    })
}

/// Posterior location before averaging over group count; factored out so the
/// formula itself can be exercised at any `m`.
pub(crate) fn posterior_location(delta0: f64, delta_bar: Vec2, m: f64) -> f64 {
    (delta0 + (m / 2.0) * delta_bar.sum()) / (m + 1.0)
}

/// Conjugate update of the prior hyperparameters against the observed pairs.
pub fn conjugate_update(
    hyper: &NiwHyperparams,
    pairs: &SensitivityPairs,
) -> Result<ConjugateUpdate> {
    let stats = scatter_stats(pairs)?;
    let m = pairs.m() as f64;
    let r = stats.delta_bar.sub(Vec2::splat(hyper.delta0));
    let psi_tilde = hyper
        .psi
        .add(stats.s_matrix)
        .add(r.outer().scale(m / (m + 1.0)));
    if !psi_tilde.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(ConjugateUpdate {
        delta_tilde: posterior_location(hyper.delta0, stats.delta_bar, m),
        psi_tilde,
        nu_tilde: hyper.nu + m,
        s_matrix: stats.s_matrix,
        delta_bar: stats.delta_bar,
    })
}

/// Log of the bivariate gamma function:
/// `ln Gamma_2(a) = ln pi / 2 + ln Gamma(a) + ln Gamma(a - 1/2)`.
pub fn gamma2_log(a: f64) -> Result<f64> {
    if !(a > 0.5) {
        return Err(Error::Gamma2Pole(a));
    }
    Ok(0.5 * std::f64::consts::PI.ln() + ln_gamma(a) + ln_gamma(a - 0.5))
}

/// Negative log marginal likelihood of the pairs under the NIW prior.
///
/// The `ln(m+1)/2` term is the normalizing constant contributed by the
/// posterior's conditional precision; it is constant in the hyperparameters
/// (so optimization is unaffected) but keeps `exp(-value)` equal to the
/// integral of the joint density over the latent location and covariance.
pub fn neg_log_marginal(hyper: &NiwHyperparams, pairs: &SensitivityPairs) -> Result<f64> {
    let update = conjugate_update(hyper, pairs)?;
    let m = pairs.m() as f64;
    Ok(m * std::f64::consts::PI.ln() + 0.5 * (m + 1.0).ln()
        - (hyper.nu / 2.0) * hyper.psi.ln_det()?
        + (update.nu_tilde / 2.0) * update.psi_tilde.ln_det()?
        + gamma2_log(hyper.nu / 2.0)?
        - gamma2_log(update.nu_tilde / 2.0)?)
}

/// Stationary point of the objective in the scale matrix at fixed
/// `(delta0, nu)`: `(nu/m) (S + m/(m+1) r r')` with `r = delta_bar - delta0 1`.
pub fn psi_star(delta0: f64, nu: f64, pairs: &SensitivityPairs) -> Result<SymMat2> {
    if !(nu > 1.0) {
        return Err(Error::InvalidDegreesOfFreedom(nu));
    }
    let stats = scatter_stats(pairs)?;
    let m = pairs.m() as f64;
    let r = stats.delta_bar.sub(Vec2::splat(delta0));
    Ok(stats
        .s_matrix
        .add(r.outer().scale(m / (m + 1.0)))
        .scale(nu / m))
}

/// Objective profiled over the closed-form scale matrix, as a function of the
/// prior degrees of freedom only (the location enters additively and drops out
/// of curvature comparisons):
/// `nu ln((m+nu)/nu) + m ln((m+nu)/m) + ln Gamma_2(nu/2) - ln Gamma_2((nu+m)/2)`.
pub fn profiled_nu_objective(nu: f64, m: f64) -> Result<f64> {
    if !(nu > 1.0) {
        return Err(Error::InvalidDegreesOfFreedom(nu));
    }
    Ok(nu * ((m + nu) / nu).ln() + m * ((m + nu) / m).ln() + gamma2_log(nu / 2.0)?
        - gamma2_log((nu + m) / 2.0)?)
}

/// Controls for [`fit_hyperparams`], exposed as CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Lower bound of the degrees-of-freedom grid.
    pub nu_min: f64,
    /// Upper grid bound as a multiple of the group count.
    pub nu_max_factor: f64,
    /// Number of log-spaced grid points.
    pub nu_grid: usize,
    /// Convergence threshold on objective improvement.
    pub tol: f64,
    /// Iteration cap for the golden-section searches and outer passes.
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            nu_min: 1.05,
            nu_max_factor: 50.0,
            nu_grid: 128,
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// Result of the empirical-Bayes fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub hyperparams: NiwHyperparams,
    /// Objective value at the returned optimum.
    pub objective: f64,
    /// Whether second differences along fixed positive-definite directions in
    /// the scale matrix were non-negative at the optimum (the convexity
    /// condition holds there).
    pub psi_convex_at_optimum: bool,
    /// Squared Mahalanobis distance of the fitted location from the row mean
    /// under the scatter; always within `(m+1)/m`.
    pub mahalanobis_sq: f64,
    /// Outer refinement passes executed.
    pub iterations: usize,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
        if (hi - lo).abs() < 1e-13 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Degrees-of-freedom selection: evaluate the profiled objective on a
/// log-spaced grid, take discrete second differences, and refine the point of
/// maximum curvature (the knee of the decaying objective) by golden section.
fn select_nu(m: f64, config: &FitConfig) -> Result<f64> {
    let t_lo = config.nu_min.ln();
    let t_hi = (config.nu_max_factor * m).ln();
    let n = config.nu_grid.max(8);
    let h = (t_hi - t_lo) / (n - 1) as f64;
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        g.push(profiled_nu_objective((t_lo + i as f64 * h).exp(), m)?);
    }
    let mut best = 1usize;
    let mut best_curv = f64::NEG_INFINITY;
    for i in 1..n - 1 {
        let curv = g[i - 1] - 2.0 * g[i] + g[i + 1];
        if curv > best_curv {
            best_curv = curv;
            best = i;
        }
    }
    let curvature = |t: f64| -> f64 {
        let lo = (t - h).exp().max(config.nu_min);
        let mid = t.exp();
        let hi = (t + h).exp();
        match (
            profiled_nu_objective(lo, m),
            profiled_nu_objective(mid, m),
            profiled_nu_objective(hi, m),
        ) {
            (Ok(a), Ok(b), Ok(c)) => a - 2.0 * b + c,
            _ => f64::NEG_INFINITY,
        }
    };
    let bracket_lo = t_lo + (best - 1) as f64 * h;
    let bracket_hi = t_lo + (best + 1) as f64 * h;
    let t_star = golden_min(|t| -curvature(t), bracket_lo, bracket_hi, config.max_iter);
    Ok(t_star.exp().max(config.nu_min))
}

/// Feasible interval for the prior location: the segment of the line where
/// the squared Mahalanobis distance `(delta_bar - d0 1)' S^-1 (delta_bar - d0 1)`
/// stays within `(m+1)/m`, the region where the profiled objective is convex.
fn location_interval(stats: &ScatterStats, m: f64) -> Result<(f64, f64)> {
    let sinv = stats.s_matrix.inverse()?;
    let z = sinv.quad_form_ones();
    let u = sinv.mul_vec(stats.delta_bar).sum();
    let w = sinv.quad_form(stats.delta_bar);
    let bound = (m + 1.0) / m;
    let disc = u * u - z * (w - bound);
    if !(disc >= 0.0) || z <= 0.0 {
        return Err(Error::EmptyFeasibleInterval);
    }
    let root = disc.sqrt();
    Ok(((u - root) / z, (u + root) / z))
}

/// Fits `(delta0, Psi, nu)` by alternating the closed-form scale optimum, the
/// curvature-knee degrees of freedom and a golden-section location search
/// inside the convexity region.
pub fn fit_hyperparams(pairs: &SensitivityPairs, config: &FitConfig) -> Result<FitOutcome> {
    let stats = scatter_stats(pairs)?;
    let m = pairs.m() as f64;
    let nu_star = select_nu(m, config)?;
    let (d_lo, d_hi) = location_interval(&stats, m)?;

    let objective_at = |delta0: f64| -> Result<f64> {
        let psi = psi_star(delta0, nu_star, pairs)?;
        let hyper = NiwHyperparams::new(delta0, psi, nu_star)?;
        neg_log_marginal(&hyper, pairs)
    };

    let mut delta0 = pairs.pooled_mean().clamp(d_lo, d_hi);
    let mut best = objective_at(delta0)?;
    let mut iterations = 0;
    for _ in 0..2 {
        iterations += 1;
        let candidate = golden_min(
            |d| objective_at(d).unwrap_or(f64::INFINITY),
            d_lo,
            d_hi,
            config.max_iter,
        );
        let value = objective_at(candidate)?;
        if !value.is_finite() {
            return Err(Error::OptimizerDiverged {
                iterations,
                objective: value,
            });
        }
        let improved = best - value;
        if value < best {
            best = value;
            delta0 = candidate;
        }
        if improved.abs() < config.tol {
            break;
        }
    }

    let psi = psi_star(delta0, nu_star, pairs)?;
    let hyper = NiwHyperparams::new(delta0, psi, nu_star)?;
    let sinv = stats.s_matrix.inverse()?;
    let r = stats.delta_bar.sub(Vec2::splat(delta0));
    let mahalanobis_sq = sinv.quad_form(r);

    // convexity check along fixed positive-definite directions at the optimum
    let dirs = [
        SymMat2::identity(),
        SymMat2::new(1.0, 0.5, 1.0),
        SymMat2::new(2.0, -0.3, 1.0),
    ];
    let step = 1e-4 * (psi.trace().abs() + 1e-12);
    let mut convex = true;
    for dir in dirs {
        let eval = |t: f64| -> f64 {
            let p = psi.add(dir.scale(t));
            NiwHyperparams::new(delta0, p, nu_star)
                .and_then(|h| neg_log_marginal(&h, pairs))
                .unwrap_or(f64::INFINITY)
        };
        let second = eval(step) - 2.0 * eval(0.0) + eval(-step);
        if !(second >= -1e-8 * (1.0 + best.abs())) {
            convex = false;
        }
    }

    Ok(FitOutcome {
        hyperparams: hyper,
        objective: best,
        psi_convex_at_optimum: convex,
        mahalanobis_sq,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn pairs_from(rows: &[(f64, f64)]) -> SensitivityPairs {
        SensitivityPairs::new(rows.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).unwrap()
    }

    fn jittered_pairs(seed: u64, m: usize, center: f64, sd: f64) -> SensitivityPairs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..m)
            .map(|_| {
                Vec2::new(
                    center + sd * rng.sample::<f64, _>(StandardNormal),
                    center + sd * rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        SensitivityPairs::new(rows).unwrap()
    }

    #[test]
    fn scatter_rejects_identical_rows() {
        let pairs = pairs_from(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(
            scatter_stats(&pairs),
            Err(Error::DegenerateScatter)
        ));
    }

    #[test]
    fn scatter_matches_definition_loop() {
        let pairs = pairs_from(&[(0.0, 0.0), (2.0, 0.0), (1.0, 3.0)]);
        let stats = scatter_stats(&pairs).unwrap();
        assert_eq!(stats.delta_bar, Vec2::new(1.0, 1.0));
        let mut s = SymMat2::zero();
        for row in pairs.rows() {
            let d = row.sub(stats.delta_bar);
            s = s.add(d.outer());
        }
        assert_relative_eq!(stats.s_matrix.a, s.a, epsilon = 1e-14);
        assert_relative_eq!(stats.s_matrix.b, s.b, epsilon = 1e-14);
        assert_relative_eq!(stats.s_matrix.d, s.d, epsilon = 1e-14);
    }

    #[test]
    fn scatter_permutation_invariant() {
        let a = pairs_from(&[(0.0, 0.1), (2.0, 0.4), (1.0, 3.0), (0.5, -1.0)]);
        let b = pairs_from(&[(0.5, -1.0), (2.0, 0.4), (0.0, 0.1), (1.0, 3.0)]);
        let sa = scatter_stats(&a).unwrap();
        let sb = scatter_stats(&b).unwrap();
        assert_eq!(sa.delta_bar, sb.delta_bar);
        assert_relative_eq!(sa.s_matrix.b, sb.s_matrix.b, epsilon = 1e-14);
    }

    #[test]
    fn posterior_location_single_group_formula() {
        // m = 1, delta0 = 0, row (2, 4): (0 + (1/2) * 6) / 2 = 1.5
        assert_eq!(posterior_location(0.0, Vec2::new(2.0, 4.0), 1.0), 1.5);
    }

    #[test]
    fn update_centering_identity() {
        // when delta_bar = delta0 * ones the rank-one correction vanishes
        let pairs = pairs_from(&[(0.30, 0.50), (0.50, 0.32), (0.40, 0.38)]);
        let psi = SymMat2::new(0.02, 0.001, 0.03);
        let hyper = NiwHyperparams::new(0.4, psi, 5.0).unwrap();
        let update = conjugate_update(&hyper, &pairs).unwrap();
        let expect = psi.add(update.s_matrix);
        assert_relative_eq!(update.psi_tilde.a, expect.a, epsilon = 1e-14);
        assert_relative_eq!(update.psi_tilde.b, expect.b, epsilon = 1e-14);
        assert_relative_eq!(update.psi_tilde.d, expect.d, epsilon = 1e-14);
    }

    #[test]
    fn update_df_is_exact_addition() {
        let pairs = jittered_pairs(1, 15, 0.0, 0.05);
        let hyper =
            NiwHyperparams::new(0.0, SymMat2::new(0.01, 0.0, 0.01), 5.0).unwrap();
        assert_eq!(conjugate_update(&hyper, &pairs).unwrap().nu_tilde, 20.0);
    }

    #[test]
    fn gamma2_exact_values() {
        // Gamma_2(1.5) = sqrt(pi) * Gamma(1.5) * Gamma(1) = pi / 2
        assert_relative_eq!(
            gamma2_log(1.5).unwrap(),
            (std::f64::consts::PI / 2.0).ln(),
            epsilon = 1e-13
        );
        // Gamma_2(2.5) = sqrt(pi) * Gamma(2.5) * Gamma(2) = 3 pi / 4
        // reference value from 50-digit arithmetic
        assert_relative_eq!(
            gamma2_log(2.5).unwrap(),
            0.857_047_813_397_619_2,
            epsilon = 1e-12
        );
        assert!(gamma2_log(0.5).is_err());
        assert!(gamma2_log(0.1).is_err());
    }

    #[test]
    fn gamma2_monotone_once_past_digamma_root() {
        // the derivative is digamma(a) + digamma(a - 1/2), negative just above
        // the pole and positive from a ~ 1.748 onward
        let mut prev = gamma2_log(1.75).unwrap();
        for i in 1..200 {
            let a = 1.75 + i as f64 * 0.05;
            let next = gamma2_log(a).unwrap();
            assert!(next > prev, "not increasing at a = {a}");
            prev = next;
        }
        // and it genuinely dips first
        assert!(gamma2_log(1.6).unwrap() < gamma2_log(1.5).unwrap());
    }

    #[test]
    fn marginal_permutation_invariant() {
        let a = pairs_from(&[(0.01, 0.03), (0.05, -0.02), (-0.01, 0.02), (0.0, 0.01)]);
        let b = pairs_from(&[(0.0, 0.01), (0.01, 0.03), (-0.01, 0.02), (0.05, -0.02)]);
        let hyper =
            NiwHyperparams::new(0.005, SymMat2::new(0.003, 0.0002, 0.002), 4.0).unwrap();
        assert_relative_eq!(
            neg_log_marginal(&hyper, &a).unwrap(),
            neg_log_marginal(&hyper, &b).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn marginal_scale_identity() {
        // scaling Psi -> c Psi changes the objective exactly as recomputed
        let pairs = jittered_pairs(8, 6, 0.0, 0.05);
        let psi = SymMat2::new(0.004, 0.0005, 0.003);
        let (nu, c) = (4.0, 3.7);
        let base = NiwHyperparams::new(0.01, psi, nu).unwrap();
        let scaled = NiwHyperparams::new(0.01, psi.scale(c), nu).unwrap();
        let l0 = neg_log_marginal(&base, &pairs).unwrap();
        let l1 = neg_log_marginal(&scaled, &pairs).unwrap();
        let u0 = conjugate_update(&base, &pairs).unwrap();
        let u1 = conjugate_update(&scaled, &pairs).unwrap();
        let expect = (u1.nu_tilde / 2.0) * u1.psi_tilde.ln_det().unwrap()
            - (u0.nu_tilde / 2.0) * u0.psi_tilde.ln_det().unwrap()
            - (nu / 2.0) * (c * c).ln();
        assert_relative_eq!(l1 - l0, expect, epsilon = 1e-10);
    }

    #[test]
    fn psi_star_centered_case_and_linearity() {
        let pairs = pairs_from(&[(0.30, 0.50), (0.50, 0.32), (0.40, 0.38)]);
        let stats = scatter_stats(&pairs).unwrap();
        let m = 3.0;
        let p1 = psi_star(0.4, 2.0, &pairs).unwrap();
        let expect = stats.s_matrix.scale(2.0 / m);
        assert_relative_eq!(p1.a, expect.a, epsilon = 1e-14);
        assert_relative_eq!(p1.b, expect.b, epsilon = 1e-14);
        let p2 = psi_star(0.4, 4.0, &pairs).unwrap();
        assert_relative_eq!(p2.a, 2.0 * p1.a, epsilon = 1e-14);
        assert_relative_eq!(p2.d, 2.0 * p1.d, epsilon = 1e-14);
    }

    #[test]
    fn psi_star_is_stationary() {
        let pairs = jittered_pairs(17, 10, 0.02, 0.05);
        let (delta0, nu) = (0.015, 3.0);
        let psi = psi_star(delta0, nu, &pairs).unwrap();
        let base = |p: SymMat2| {
            neg_log_marginal(&NiwHyperparams::new(delta0, p, nu).unwrap(), &pairs).unwrap()
        };
        // step balances truncation against cancellation in the central difference
        let h = 1e-5 * psi.trace();
        for (da, db, dd) in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)] {
            let up = base(psi.add(SymMat2::new(da * h, db * h, dd * h)));
            let down = base(psi.add(SymMat2::new(-da * h, -db * h, -dd * h)));
            let grad = (up - down) / (2.0 * h);
            assert!(grad.abs() < 1e-6, "gradient {grad} along ({da},{db},{dd})");
        }
    }

    #[test]
    fn profiled_nu_objective_monotone_decreasing() {
        let m = 15.0;
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let nu = (1.05f64.ln() + i as f64 * 0.03).exp();
            let v = profiled_nu_objective(nu, m).unwrap();
            assert!(v < prev, "profiled objective rose at nu = {nu}");
            prev = v;
        }
    }

    #[test]
    fn location_profile_convex_inside_ball() {
        let pairs = jittered_pairs(23, 12, 0.0, 0.05);
        let stats = scatter_stats(&pairs).unwrap();
        let m = pairs.m() as f64;
        let (lo, hi) = location_interval(&stats, m).unwrap();
        let nu = 2.0;
        let f = |d0: f64| {
            let psi = psi_star(d0, nu, &pairs).unwrap();
            neg_log_marginal(&NiwHyperparams::new(d0, psi, nu).unwrap(), &pairs).unwrap()
        };
        let n = 41;
        let h = (hi - lo) / (n as f64 + 1.0);
        for i in 1..n {
            let d = lo + i as f64 * h;
            let second = f(d - h) - 2.0 * f(d) + f(d + h);
            assert!(
                second >= -1e-9,
                "negative curvature {second} at delta0 = {d}"
            );
        }
    }

    #[test]
    fn fit_recovers_common_center() {
        let c = 0.7;
        let pairs = jittered_pairs(31, 12, c, 0.004);
        let fit = fit_hyperparams(&pairs, &FitConfig::default()).unwrap();
        assert!(
            (fit.hyperparams.delta0 - c).abs() < 0.004,
            "delta0 = {} vs center {c}",
            fit.hyperparams.delta0
        );
        assert!(fit.mahalanobis_sq <= (13.0 / 12.0) + 1e-12);
    }

    #[test]
    fn fit_center_near_zero_on_synthetic_design() {
        // pairs drawn around zero on the simulation design's scale
        for seed in 0..100u64 {
            let pairs = jittered_pairs(1000 + seed, 15, 0.0, 0.05);
            let fit = fit_hyperparams(&pairs, &FitConfig::default()).unwrap();
            assert!(
                fit.hyperparams.delta0.abs() < 0.05,
                "seed {seed}: delta0 = {}",
                fit.hyperparams.delta0
            );
        }
    }

    #[test]
    fn fit_beats_random_feasible_probes() {
        let pairs = jittered_pairs(47, 15, 0.01, 0.05);
        let config = FitConfig::default();
        let fit = fit_hyperparams(&pairs, &config).unwrap();
        let stats = scatter_stats(&pairs).unwrap();
        let m = pairs.m() as f64;
        let (lo, hi) = location_interval(&stats, m).unwrap();
        let nu = fit.hyperparams.nu;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d0 = rng.gen_range(lo..hi);
            let psi = if rng.gen_bool(0.5) {
                psi_star(d0, nu, &pairs).unwrap()
            } else {
                // jitter the optimum while staying positive definite
                let p = fit.hyperparams.psi;
                let f = rng.gen_range(0.7..1.4);
                SymMat2::new(p.a * f, p.b * rng.gen_range(0.5..1.1), p.d * rng.gen_range(0.8..1.3))
            };
            if !psi.is_positive_definite() {
                continue;
            }
            let probe =
                neg_log_marginal(&NiwHyperparams::new(d0, psi, nu).unwrap(), &pairs).unwrap();
            assert!(
                probe >= fit.objective - 1e-8,
                "probe {probe} beat fit {}",
                fit.objective
            );
        }
    }
}
