//! Conversion from physical parameters to the dimensionless groups used
//! everywhere else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical inputs in any consistent unit system (SI recommended).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Coupling squared times atomic density, `g²n` (rate²).
    pub g2n: f64,
    /// Excited-state decay rate `γ`.
    pub gamma: f64,
    /// Cloud length `L`.
    pub length: f64,
    /// Speed of light `c`.
    pub c: f64,
    /// Non-vortex control Rabi frequency `|Ω₁₂|`.
    pub omega12: f64,
    /// Probe detuning `Δω`.
    pub detuning: f64,
}

/// The dimensionless groups `(ξ, α, γ̃, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessGroups {
    pub xi: f64,
    pub alpha: f64,
    pub gamma_tilde: f64,
    pub epsilon: f64,
}

impl PhysicalParams {
    /// On-axis group velocity `v₀(0) = c|Ω₁₂|²/(g²n)`.
    pub fn v0(&self) -> f64 {
        self.c * self.omega12 * self.omega12 / self.g2n
    }

    pub fn to_dimensionless(&self) -> Result<DimensionlessGroups> {
        let positive = [self.g2n, self.gamma, self.length, self.c, self.omega12];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) || !self.detuning.is_finite() {
            return Err(Error::InvalidInput(
                "g2n, gamma, length, c and omega12 must be finite and positive".into(),
            ));
        }
        let v0 = self.v0();
        Ok(DimensionlessGroups {
            xi: self.detuning * self.length / v0,
            alpha: 2.0 * self.g2n * self.length / (self.c * self.gamma),
            gamma_tilde: self.gamma * self.length / v0,
            epsilon: v0 / self.c,
        })
    }
}
