//! Closed-form E-value densities, distribution functions and quantiles for
//! three approximation regimes of the risk ratio:
//!
//! * normal sensitivity parameter with known missingness and outcome scale
//!   (log-normal risk ratio),
//! * normal sensitivity parameter times normal missingness fraction
//!   (log-normal risk ratio with product-approximated moments),
//! * inverse-gamma outcome scale (log-gamma risk ratio).
//!
//! The E-value `v` relates to the risk ratio through `rr = v^2 / (2v - 1)` on
//! the elevated branch and its reciprocal on the reduced branch; densities are
//! the change of variables of the risk-ratio law through that map.

use statrs::distribution::{Continuous, ContinuousCDF, Gamma, Normal};

use crate::error::{Error, Result};
use crate::model::EvalueDensityParams;

/// Which side of the risk-ratio reference the density piece describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrBranch {
    /// Risk ratio above one.
    Above1,
    /// Risk ratio below one. For the log-gamma family this branch carries no
    /// mass and the exposed density is the sign-flipped mirror; treat it as
    /// experimental.
    Below1,
}

/// `ln(v^2 / (2v - 1))`, the log risk ratio at E-value `v > 1`.
pub fn log_rr_at(v: f64) -> Result<f64> {
    if !(v > 1.0) || !v.is_finite() {
        return Err(Error::OutsideSupport(v));
    }
    Ok(2.0 * v.ln() - (2.0 * (v - 1.0)).ln_1p())
}

/// `|d ln rr / dv| = 1/v - 1/(v (2v-1))`.
fn jacobian(v: f64) -> f64 {
    2.0 * (v - 1.0) / (v * (2.0 * v - 1.0))
}

/// E-value whose elevated-branch risk ratio is `exp(x)`.
fn v_at_log_rr(x: f64) -> f64 {
    let r = x.exp();
    r + (r * (r - 1.0)).sqrt()
}

/// Moments for a normally distributed sensitivity parameter with known
/// observed fraction and outcome deviation:
/// `mu_rr = 0.91 (1-p) eta / sd_y`, `sigma_rr = 0.91 (1-p) tau / sd_y`.
pub fn params_normal_effect(eta: f64, tau: f64, p_obs: f64, sd_y: f64) -> Result<EvalueDensityParams> {
    if !(tau > 0.0) {
        return Err(Error::NonPositiveParameter { name: "tau", value: tau });
    }
    if !(sd_y > 0.0) {
        return Err(Error::NonPositiveParameter { name: "sd_y", value: sd_y });
    }
    if !(p_obs > 0.0 && p_obs < 1.0) {
        return Err(Error::ObservedFractionOutOfRange(p_obs));
    }
    let c = 0.91 * (1.0 - p_obs) / sd_y;
    EvalueDensityParams::log_normal(c * eta, c * tau)
}

/// Validity ratios `(sigma_q / mu_q, tau / eta)` of the normal product
/// approximation; the approximation degrades once either leaves ~0.2.
pub fn product_validity_ratios(eta: f64, tau: f64, mu_q: f64, sigma_q: f64) -> (f64, f64) {
    (sigma_q / mu_q, tau / eta)
}

/// Threshold on the validity ratios past which constructors log a warning.
pub const VALIDITY_RATIO_LIMIT: f64 = 0.2;

/// Moments when the missingness fraction is itself noisy:
/// the product of the two normals is approximated by a normal with matched
/// moments, so `mu_rr = 0.91 mu_q eta / sd_y` and
/// `sigma_rr = 0.91 sqrt(mu_q^2 tau^2 + eta^2 sigma_q^2 + sigma_q^2 tau^2) / sd_y`.
pub fn params_product_effect(
    eta: f64,
    tau: f64,
    mu_q: f64,
    sigma_q: f64,
    sd_y: f64,
) -> Result<EvalueDensityParams> {
    if mu_q == 0.0 {
        return Err(Error::NonPositiveParameter { name: "mu_q", value: mu_q });
    }
    if eta == 0.0 {
        return Err(Error::NonPositiveEffect(eta));
    }
    if !(mu_q > 0.0) {
        return Err(Error::NonPositiveParameter { name: "mu_q", value: mu_q });
    }
    if !(tau > 0.0) {
        return Err(Error::NonPositiveParameter { name: "tau", value: tau });
    }
    if !(sigma_q >= 0.0) {
        return Err(Error::NonPositiveParameter { name: "sigma_q", value: sigma_q });
    }
    if !(sd_y > 0.0) {
        return Err(Error::NonPositiveParameter { name: "sd_y", value: sd_y });
    }
    let (rho1, rho2) = product_validity_ratios(eta, tau, mu_q, sigma_q);
    if rho1.abs() > VALIDITY_RATIO_LIMIT || rho2.abs() > VALIDITY_RATIO_LIMIT {
        log::warn!(
            "product-normal approximation is unreliable: rho1 = {rho1:.3}, rho2 = {rho2:.3} (limit {VALIDITY_RATIO_LIMIT})"
        );
    }
    let var = mu_q * mu_q * tau * tau + eta * eta * sigma_q * sigma_q + sigma_q * sigma_q * tau * tau;
    EvalueDensityParams::log_normal(0.91 * mu_q * eta / sd_y, 0.91 * var.sqrt() / sd_y)
}

/// Both rate orientations for the log-gamma family: `(beta / (0.91 mu_q eta),
/// mu_q eta / (0.91 beta))`. The first follows from the scale of the gamma law
/// of the reciprocal outcome deviation and is the one the simulation oracle
/// confirms; the second is the reciprocal-style alternative it rejects.
pub fn gamma_rate_candidates(mu_q: f64, eta: f64, beta: f64) -> (f64, f64) {
    (beta / (0.91 * mu_q * eta), mu_q * eta / (0.91 * beta))
}

/// Parameters when the outcome deviation follows an inverse-gamma law: the
/// log risk ratio is gamma with shape `alpha` and the oracle-resolved rate.
///
/// Requires a positive effect direction: the gamma support covers only
/// elevated risk ratios.
pub fn params_gamma_scale(
    eta: f64,
    tau: f64,
    mu_q: f64,
    sigma_q: f64,
    alpha: f64,
    beta: f64,
) -> Result<EvalueDensityParams> {
    if !(eta > 0.0) {
        return Err(Error::NonPositiveEffect(eta));
    }
    for (name, value) in [("tau", tau), ("mu_q", mu_q), ("alpha", alpha), ("beta", beta)] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    if !(sigma_q >= 0.0) {
        return Err(Error::NonPositiveParameter { name: "sigma_q", value: sigma_q });
    }
    let (rho1, rho2) = product_validity_ratios(eta, tau, mu_q, sigma_q);
    let var = mu_q * mu_q * tau * tau + eta * eta * sigma_q * sigma_q + sigma_q * sigma_q * tau * tau;
    let rho3 = var.sqrt() / (mu_q * eta);
    if rho1.abs() > VALIDITY_RATIO_LIMIT
        || rho2.abs() > VALIDITY_RATIO_LIMIT
        || rho3 > VALIDITY_RATIO_LIMIT
    {
        log::warn!(
            "gamma-tail approximation is unreliable: rho1 = {rho1:.3}, rho2 = {rho2:.3}, rho3 = {rho3:.3} (limit {VALIDITY_RATIO_LIMIT})"
        );
    }
    let (rate, _) = gamma_rate_candidates(mu_q, eta, beta);
    EvalueDensityParams::log_gamma(alpha, rate)
}

/// Per-branch density at `v > 1`; each branch integrates to its own
/// probability mass.
pub fn density(params: &EvalueDensityParams, v: f64, branch: RrBranch) -> Result<f64> {
    let x = log_rr_at(v)?;
    let j = jacobian(v);
    match *params {
        EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => {
            let arg = match branch {
                RrBranch::Above1 => x,
                RrBranch::Below1 => -x,
            };
            let n = Normal::new(mu_rr, sigma_rr).expect("validated parameters");
            Ok(n.pdf(arg) * j)
        }
        EvalueDensityParams::LogGammaRr { alpha, beta_v } => {
            let g = Gamma::new(alpha, beta_v).expect("validated parameters");
            // Below1 is the sign-flipped mirror; it carries no mass in the
            // cdf and is exposed for inspection only.
            Ok(g.pdf(x) * j)
        }
    }
}

/// Total density at `v > 1`: sum of both branch pieces.
pub fn pdf(params: &EvalueDensityParams, v: f64) -> Result<f64> {
    match *params {
        EvalueDensityParams::LogNormalRr { .. } => {
            Ok(density(params, v, RrBranch::Above1)? + density(params, v, RrBranch::Below1)?)
        }
        EvalueDensityParams::LogGammaRr { .. } => density(params, v, RrBranch::Above1),
    }
}

/// Probability mass of a branch.
pub fn branch_mass(params: &EvalueDensityParams, branch: RrBranch) -> f64 {
    match *params {
        EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => {
            let n = Normal::new(0.0, 1.0).unwrap();
            let above = 1.0 - n.cdf(-mu_rr / sigma_rr);
            match branch {
                RrBranch::Above1 => above,
                RrBranch::Below1 => 1.0 - above,
            }
        }
        EvalueDensityParams::LogGammaRr { .. } => match branch {
            RrBranch::Above1 => 1.0,
            RrBranch::Below1 => 0.0,
        },
    }
}

/// Distribution function at `v > 1`: branch masses accumulated below `v`.
///
/// `V <= v` corresponds to the risk ratio lying between the reciprocal pair
/// `exp(-x)` and `exp(x)` with `x = ln(v^2/(2v-1))`, so both branches
/// contribute closed-form pieces.
pub fn cdf(params: &EvalueDensityParams, v: f64) -> Result<f64> {
    let x = log_rr_at(v)?;
    match *params {
        EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => {
            let n = Normal::new(0.0, 1.0).unwrap();
            Ok(n.cdf((x - mu_rr) / sigma_rr) - n.cdf((-x - mu_rr) / sigma_rr))
        }
        EvalueDensityParams::LogGammaRr { alpha, beta_v } => {
            let g = Gamma::new(alpha, beta_v).expect("validated parameters");
            Ok(g.cdf(x))
        }
    }
}

/// Upper endpoint beyond which the remaining tail mass is below ~1e-13,
/// computed analytically on the log risk-ratio scale.
pub fn tail_cutoff(params: &EvalueDensityParams) -> f64 {
    let x_hi = match *params {
        EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => mu_rr.abs() + 7.6 * sigma_rr,
        EvalueDensityParams::LogGammaRr { alpha, beta_v } => Gamma::new(alpha, beta_v)
            .expect("validated parameters")
            .inverse_cdf(1.0 - 1e-13),
    };
    v_at_log_rr(x_hi)
}

/// Inverts [`cdf`] by bracketed bisection on `(1, tail_cutoff)`.
pub fn quantile(params: &EvalueDensityParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidLevel(prob));
    }
    let mut lo = 1.0 + 1e-13;
    let mut hi = tail_cutoff(params).max(lo + 1e-12);
    // widen until the bracket straddles the target
    let mut guard = 0;
    while cdf(params, hi)? < prob {
        hi = 1.0 + (hi - 1.0) * 4.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::QuantileBracket { lo, hi, target: prob });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(params, mid)? < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::QuantileBracket { lo, hi, target: prob })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use approx::assert_relative_eq;
    use statrs::distribution::LogNormal;

    fn normal_params(mu: f64, sigma: f64) -> EvalueDensityParams {
        EvalueDensityParams::log_normal(mu, sigma).unwrap()
    }

    #[test]
    fn normal_effect_moments() {
        let p = params_normal_effect(0.0, 1.0, 0.5, 1.0).unwrap();
        match p {
            EvalueDensityParams::LogNormalRr { mu_rr, .. } => assert_eq!(mu_rr, 0.0),
            _ => panic!(),
        }
        let p = params_normal_effect(1.0, 1.0, 0.8, 1.0).unwrap();
        match p {
            EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => {
                assert_relative_eq!(mu_rr, 0.182, epsilon = 1e-12);
                assert_relative_eq!(sigma_rr, 0.182, epsilon = 1e-12);
            }
            _ => panic!(),
        }
        // both moments vanish as the observed fraction approaches one
        let p = params_normal_effect(1.0, 1.0, 1.0 - 1e-9, 1.0).unwrap();
        match p {
            EvalueDensityParams::LogNormalRr { mu_rr, sigma_rr } => {
                assert!(mu_rr < 1e-8 && sigma_rr < 1e-8);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn product_effect_reduces_to_normal_effect() {
        let a = params_product_effect(0.7, 0.05, 0.2, 0.0, 1.3).unwrap();
        let b = params_normal_effect(0.7, 0.05, 0.8, 1.3).unwrap();
        match (a, b) {
            (
                EvalueDensityParams::LogNormalRr { mu_rr: ma, sigma_rr: sa },
                EvalueDensityParams::LogNormalRr { mu_rr: mb, sigma_rr: sb },
            ) => {
                assert_relative_eq!(ma, mb, epsilon = 1e-14);
                assert_relative_eq!(sa, sb, epsilon = 1e-14);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn product_effect_moment_formula() {
        let (eta, tau, mu_q, s_q, sd) = (1.0, 0.02, 0.2, 0.01, 1.0);
        let p = params_product_effect(eta, tau, mu_q, s_q, sd).unwrap();
        match p {
            EvalueDensityParams::LogNormalRr { sigma_rr, .. } => {
                let expect = 0.91
                    * (0.2f64.powi(2) * 0.02f64.powi(2)
                        + 1.0 * 0.01f64.powi(2)
                        + 0.01f64.powi(2) * 0.02f64.powi(2))
                    .sqrt();
                assert_relative_eq!(sigma_rr, expect, epsilon = 1e-12);
            }
            _ => panic!(),
        }
        assert!(params_product_effect(eta, tau, 0.0, s_q, sd).is_err());
        assert!(params_product_effect(0.0, tau, mu_q, s_q, sd).is_err());
    }

    #[test]
    fn gamma_scale_requires_positive_effect() {
        assert!(matches!(
            params_gamma_scale(-0.5, 0.01, 0.3, 0.001, 4.0, 2.0),
            Err(Error::NonPositiveEffect(_))
        ));
    }

    #[test]
    fn gamma_rate_orientation_is_frozen() {
        // rate doubles with beta; the rejected alternative moves the other way
        let (mu_q, eta, beta) = (0.3, 0.8, 25.0);
        let (resolved, alternative) = gamma_rate_candidates(mu_q, eta, beta);
        assert_relative_eq!(resolved, beta / (0.91 * mu_q * eta), epsilon = 1e-15);
        assert_relative_eq!(alternative, mu_q * eta / (0.91 * beta), epsilon = 1e-15);
        let (resolved2, alternative2) = gamma_rate_candidates(mu_q, eta, 2.0 * beta);
        assert_relative_eq!(resolved2, 2.0 * resolved, epsilon = 1e-12);
        assert_relative_eq!(alternative2, 0.5 * alternative, epsilon = 1e-12);
        match params_gamma_scale(eta, 0.008, mu_q, 0.003, 50.0, beta).unwrap() {
            EvalueDensityParams::LogGammaRr { beta_v, .. } => {
                assert_relative_eq!(beta_v, resolved, epsilon = 1e-15)
            }
            _ => panic!(),
        }
    }

    #[test]
    fn density_hand_value() {
        // mu = 0, sigma = 1, v = 2: argument ln(4/3), jacobian 1/2 - 1/6 = 1/3
        let p = normal_params(0.0, 1.0);
        let d = density(&p, 2.0, RrBranch::Above1).unwrap();
        let x: f64 = (4.0f64 / 3.0).ln();
        let expect = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() / 3.0;
        assert_relative_eq!(d, expect, epsilon = 1e-14);
        assert!((d - 0.1276).abs() < 5e-5);
        assert!(density(&p, 1.0, RrBranch::Above1).is_err());
        assert!(density(&p, 0.5, RrBranch::Above1).is_err());
    }

    #[test]
    fn branch_symmetry_at_zero_center() {
        let p = normal_params(0.0, 0.7);
        for v in [1.001, 1.2, 2.0, 5.0, 20.0] {
            assert_relative_eq!(
                density(&p, v, RrBranch::Above1).unwrap(),
                density(&p, v, RrBranch::Below1).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn branch_integral_matches_normal_cdf() {
        let p = normal_params(0.4, 0.8);
        let hi = tail_cutoff(&p);
        let mass = integrate(
            |v| density(&p, v, RrBranch::Above1).unwrap_or(0.0),
            1.0 + 1e-12,
            hi,
            1e-10,
        )
        .unwrap();
        assert!(
            (mass - branch_mass(&p, RrBranch::Above1)).abs() < 1e-6,
            "mass {mass} vs {}",
            branch_mass(&p, RrBranch::Above1)
        );
    }

    #[test]
    fn change_of_variables_recomputation() {
        // density must equal the risk-ratio density at v^2/(2v-1) times dr/dv
        let p = normal_params(0.25, 0.6);
        let (mu, sigma) = (0.25, 0.6);
        let lognormal = LogNormal::new(mu, sigma).unwrap();
        for i in 0..50 {
            let v = 1.02 + 0.18 * i as f64;
            let r = v * v / (2.0 * v - 1.0);
            let dr_dv = 2.0 * v * (v - 1.0) / ((2.0 * v - 1.0) * (2.0 * v - 1.0));
            let expect = lognormal.pdf(r) * dr_dv;
            assert_relative_eq!(
                density(&p, v, RrBranch::Above1).unwrap(),
                expect,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn cdf_limits_and_quantile_roundtrip() {
        for p in [normal_params(0.3, 0.9), params_gamma_scale(0.8, 0.008, 0.3, 0.003, 5.0, 2.5).unwrap()] {
            assert!(cdf(&p, 1.0 + 1e-12).unwrap() < 1e-6);
            assert!(cdf(&p, tail_cutoff(&p)).unwrap() > 1.0 - 1e-9);
            for prob in [0.05, 0.3, 0.5, 0.9, 0.99] {
                let v = quantile(&p, prob).unwrap();
                assert_relative_eq!(cdf(&p, v).unwrap(), prob, epsilon = 1e-8);
                let back = quantile(&p, cdf(&p, v).unwrap()).unwrap();
                assert_relative_eq!(back, v, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn folded_median_sits_above_one_at_zero_center() {
        // half the risk-ratio mass lies on each side of one, but folding sends
        // both sides above one, so the E-value median is well above the
        // reference point
        let p = normal_params(0.0, 1.0);
        let med = quantile(&p, 0.5).unwrap();
        assert!(med > 1.0 + 1e-3, "median = {med}");
        assert_relative_eq!(cdf(&p, med).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gamma_concentrates_to_product_for_large_shape() {
        let sd_y = 0.5;
        let alpha = 4000.0;
        let beta = sd_y * (alpha - 1.0);
        let (eta, tau, mu_q, s_q) = (0.8, 0.008, 0.3, 0.003);
        let g = params_gamma_scale(eta, tau, mu_q, s_q, alpha, beta).unwrap();
        let n = params_product_effect(eta, tau, mu_q, s_q, sd_y).unwrap();
        for v in [1.3, 1.6, 2.0, 2.6] {
            let dg = pdf(&g, v).unwrap();
            let dn = pdf(&n, v).unwrap();
            if dn > 1e-3 {
                assert_relative_eq!(dg, dn, max_relative = 0.08);
            }
        }
    }

    #[test]
    fn total_mass_small_grid() {
        let grid = [
            normal_params(0.0, 0.5),
            normal_params(0.6, 1.1),
            normal_params(-0.4, 0.25),
            params_gamma_scale(0.8, 0.008, 0.3, 0.003, 3.0, 1.5).unwrap(),
        ];
        for p in grid {
            let hi = tail_cutoff(&p);
            let mass = integrate(|v| pdf(&p, v).unwrap_or(0.0), 1.0 + 1e-12, hi, 1e-9).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "total mass {mass}");
        }
    }
}
