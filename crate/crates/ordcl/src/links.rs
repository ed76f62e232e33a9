//! Latent distribution functions for cumulative link models.
//!
//! Each link is a distribution function G mapping the real line onto (0, 1),
//! together with its density g = dG/dη and density derivative g' = d²G/dη².

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::erf;
use std::fmt;
use std::str::FromStr;

/// Probabilities returned by [`cdf`] are clamped to `[PROB_EPS, 1 - PROB_EPS]`
/// so that score kernels dividing by category probabilities stay finite in
/// boundary-adjacent iterations.
pub const PROB_EPS: f64 = 1e-12;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Supported latent distributions.
///
/// The logistic link gives the proportional-odds model and the complementary
/// log-log link the proportional-hazards model in discrete time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkFamily {
    Logit,
    Probit,
    Cloglog,
}

impl LinkFamily {
    /// All supported links, e.g. for CLI help output.
    pub const ALL: [LinkFamily; 3] = [LinkFamily::Logit, LinkFamily::Probit, LinkFamily::Cloglog];

    /// Whether the latent density is symmetric about zero. Category-reversal
    /// invariance only holds for symmetric links.
    pub fn is_symmetric(self) -> bool {
        matches!(self, LinkFamily::Logit | LinkFamily::Probit)
    }

    pub fn token(self) -> &'static str {
        match self {
            LinkFamily::Logit => "logit",
            LinkFamily::Probit => "probit",
            LinkFamily::Cloglog => "cloglog",
        }
    }
}

impl fmt::Display for LinkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for LinkFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logit" => Ok(LinkFamily::Logit),
            "probit" => Ok(LinkFamily::Probit),
            "cloglog" => Ok(LinkFamily::Cloglog),
            other => Err(Error::InvalidData(format!(
                "unknown link '{other}' (expected logit, probit or cloglog)"
            ))),
        }
    }
}

#[inline]
fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub(crate) fn cdf_unchecked(link: LinkFamily, eta: f64) -> f64 {
    let p = match link {
        LinkFamily::Logit => sigmoid(eta),
        // Phi(eta) = erfc(-eta / sqrt(2)) / 2, accurate in both tails.
        LinkFamily::Probit => 0.5 * erf::erfc(-eta / std::f64::consts::SQRT_2),
        LinkFamily::Cloglog => -(-eta.exp()).exp_m1(),
    };
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

#[inline]
pub(crate) fn density_unchecked(link: LinkFamily, eta: f64) -> f64 {
    match link {
        LinkFamily::Logit => {
            let s = sigmoid(-eta.abs());
            s * (1.0 - s)
        }
        LinkFamily::Probit => (-0.5 * eta * eta).exp() * INV_SQRT_2PI,
        LinkFamily::Cloglog => (eta - eta.exp()).exp(),
    }
}

#[inline]
pub(crate) fn density_deriv_unchecked(link: LinkFamily, eta: f64) -> f64 {
    match link {
        LinkFamily::Logit => {
            let g = density_unchecked(LinkFamily::Logit, eta);
            let gamma = sigmoid(eta);
            g * (1.0 - 2.0 * gamma)
        }
        LinkFamily::Probit => -eta * density_unchecked(LinkFamily::Probit, eta),
        LinkFamily::Cloglog => {
            let g = density_unchecked(LinkFamily::Cloglog, eta);
            g * (1.0 - eta.exp())
        }
    }
}

#[inline]
fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteEta(eta))
    }
}

/// Distribution function G(η), clamped to `[PROB_EPS, 1 - PROB_EPS]`.
pub fn cdf(link: LinkFamily, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(cdf_unchecked(link, eta))
}

/// Density g(η) = dG(η)/dη.
pub fn density(link: LinkFamily, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(density_unchecked(link, eta))
}

/// Density derivative g'(η) = d²G(η)/dη².
pub fn density_deriv(link: LinkFamily, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(density_deriv_unchecked(link, eta))
}

/// Quantile function G⁻¹(p) for p in (0, 1). Used for starting values and
/// Wald interval construction.
pub fn inverse_cdf(link: LinkFamily, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidData(format!(
            "quantile argument {p} outside (0, 1)"
        )));
    }
    Ok(match link {
        LinkFamily::Logit => (p / (1.0 - p)).ln(),
        LinkFamily::Probit => -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p),
        LinkFamily::Cloglog => (-(-p).ln_1p()).ln(),
    })
}

/// Standard normal upper quantile z_{1-a/2} used for Wald intervals.
pub fn normal_quantile(p: f64) -> Result<f64> {
    inverse_cdf(LinkFamily::Probit, p)
}

/// Standard normal distribution function, for Wald p-values.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}
