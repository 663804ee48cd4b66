use serde::{Deserialize, Serialize};

use super::MellinStrip;
use crate::error::{Error, Result};
use crate::specfun::{cos_pi, sin_pi};

/// Slack used when snapping ρ onto the boundary of its admissible interval.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Admissible pair (α, ρ): `1 < α ≤ 2` and `1 − 1/α ≤ ρ ≤ 1/α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StableParams {
    alpha: f64,
    rho: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    rho: f64,
}

impl TryFrom<RawParams> for StableParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        StableParams::new(raw.alpha, raw.rho)
    }
}

impl From<StableParams> for RawParams {
    fn from(p: StableParams) -> Self {
        RawParams {
            alpha: p.alpha,
            rho: p.rho,
        }
    }
}

/// Closed interval of admissible ρ for a given α.
pub fn admissible_rho_range(alpha: f64) -> (f64, f64) {
    (1.0 - 1.0 / alpha, 1.0 / alpha)
}

impl StableParams {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::Admissibility(format!(
                "alpha = {alpha} must satisfy 1 < alpha <= 2"
            )));
        }
        let (lo, hi) = admissible_rho_range(alpha);
        if !(rho >= lo - BOUNDARY_SLACK && rho <= hi + BOUNDARY_SLACK) {
            return Err(Error::Admissibility(format!(
                "rho = {rho} must lie in [{lo}, {hi}] for alpha = {alpha}"
            )));
        }
        let rho = if (rho - hi).abs() <= BOUNDARY_SLACK {
            hi
        } else if (rho - lo).abs() <= BOUNDARY_SLACK {
            lo
        } else {
            rho
        };
        Ok(Self { alpha, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// ρα, the index of the stable quotient in the hitting-time factorization.
    pub fn rho_alpha(&self) -> f64 {
        self.rho * self.alpha
    }

    /// ρ = 1/α: no positive jumps, and τ is a positive (1/α)-stable variable.
    pub fn is_spectrally_negative(&self) -> bool {
        self.rho == 1.0 / self.alpha
    }

    /// ρ = 1 − 1/α: no negative jumps.
    pub fn is_spectrally_positive(&self) -> bool {
        self.rho == 1.0 - 1.0 / self.alpha && !self.is_spectrally_negative()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.rho - 0.5).abs() <= BOUNDARY_SLACK
    }

    /// Skewness θ of the (c, θ) parametrization,
    /// ρ = 1/2 + (πα)^{-1} arctan(θ tan(πα/2)). Undefined at α = 2.
    pub fn theta(&self) -> Option<f64> {
        let t = (std::f64::consts::PI * self.alpha / 2.0).tan();
        if self.alpha == 2.0 || t.abs() < 1e-300 {
            return None;
        }
        Some((std::f64::consts::PI * self.alpha * (self.rho - 0.5)).tan() / t)
    }

    /// Scale c = cos(πα(ρ − 1/2)) of the (c, θ) parametrization.
    pub fn scale_c(&self) -> f64 {
        cos_pi(self.alpha * (self.rho - 0.5))
    }

    /// Finiteness interval of s ↦ E[τ^s].
    pub fn tau_strip(&self) -> MellinStrip {
        if self.is_spectrally_negative() {
            MellinStrip::new(f64::NEG_INFINITY, 1.0 / self.alpha)
        } else {
            MellinStrip::new(-1.0 - 1.0 / self.alpha, 1.0 - 1.0 / self.alpha)
        }
    }

    /// Local-time normalizing constant α sin(π/α) / sin(πρ).
    pub fn local_time_constant(&self) -> f64 {
        self.alpha * sin_pi(1.0 / self.alpha) / sin_pi(self.rho)
    }
}
