use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LOGNORMAL_MU: f64 = -0.702;
pub const LOGNORMAL_SIGMA2: f64 = 0.9355;

/// Difference-of-Gaussians covariance parameters, lengths in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterSurroundParams {
    pub sigma_c: f64,
    pub sigma_s: f64,
    /// Surround weight; at most `(sigma_c / sigma_s)²`.
    pub k: f64,
    /// Diagonal jitter added before factorisation.
    pub epsilon: f64,
}

impl Default for CenterSurroundParams {
    fn default() -> Self {
        let (sigma_c, sigma_s) = (1.0, 2.5);
        CenterSurroundParams { sigma_c, sigma_s, k: 0.9 * (sigma_c / sigma_s) * (sigma_c / sigma_s), epsilon: 1e-8 }
    }
}

impl CenterSurroundParams {
    /// Largest surround weight for which the 2-D difference-of-Gaussians has a
    /// non-negative spectral density, and hence is a valid covariance on any
    /// point set.
    pub fn k_bound(&self) -> f64 {
        (self.sigma_c / self.sigma_s) * (self.sigma_c / self.sigma_s)
    }

    /// Marginal variance of every synapse, `K(0) + ε`.
    pub fn marginal_variance(&self) -> f64 {
        1.0 - self.k + self.epsilon
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |cond: bool, msg: String| if cond { Ok(()) } else { Err(Error::InvalidDistribution(msg)) };
        ok(self.sigma_c > 0.0, format!("sigma_c must be positive, got {}", self.sigma_c))?;
        ok(self.sigma_s > self.sigma_c, format!("sigma_s ({}) must exceed sigma_c ({})", self.sigma_s, self.sigma_c))?;
        ok(self.k >= 0.0, format!("k must be non-negative, got {}", self.k))?;
        ok(
            self.k <= self.k_bound(),
            format!("k = {} exceeds the PSD bound (sigma_c/sigma_s)^2 = {}", self.k, self.k_bound()),
        )?;
        ok(self.epsilon > 0.0, format!("epsilon must be positive, got {}", self.epsilon))
    }
}

/// Generative model for the frozen convolutional weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynapseDistribution {
    Normal,
    LogNormal {
        mu: f64,
        sigma2: f64,
        /// Multiply every weight by an independent random sign.
        #[serde(default)]
        sign_flip: bool,
    },
    CenterSurround(CenterSurroundParams),
}

impl SynapseDistribution {
    pub fn lognormal() -> Self {
        SynapseDistribution::LogNormal { mu: LOGNORMAL_MU, sigma2: LOGNORMAL_SIGMA2, sign_flip: false }
    }

    pub fn center_surround() -> Self {
        SynapseDistribution::CenterSurround(CenterSurroundParams::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            SynapseDistribution::Normal => "normal",
            SynapseDistribution::LogNormal { .. } => "lognormal",
            SynapseDistribution::CenterSurround(_) => "center-surround",
        }
    }

    /// `E[w²]` of a single synapse.
    pub fn second_moment(&self) -> f64 {
        match *self {
            SynapseDistribution::Normal => 1.0,
            SynapseDistribution::LogNormal { mu, sigma2, .. } => (2.0 * mu + 2.0 * sigma2).exp(),
            SynapseDistribution::CenterSurround(p) => p.marginal_variance(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SynapseDistribution::Normal => Ok(()),
            SynapseDistribution::LogNormal { mu, sigma2, .. } => {
                if !mu.is_finite() || !(*sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "log-normal needs finite mu and sigma2 > 0, got mu = {mu}, sigma2 = {sigma2}"
                    )));
                }
                Ok(())
            }
            SynapseDistribution::CenterSurround(p) => p.validate(),
        }
    }
}
