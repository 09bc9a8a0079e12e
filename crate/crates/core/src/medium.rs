//! Control-beam geometry and the group-velocity matrix of the double-tripod
//! medium, all in dimensionless units.
//!
//! Lengths along the cloud are in units of the cloud length `L`, radii in units
//! of the vortex beam width `σ`, velocities in units of the on-axis group
//! velocity `v₀(0)` and the Rabi matrix is normalized so that `|Ω₁₂| = 1`.

use std::f64::consts::{E, FRAC_1_SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat2, CVec2, ONE};

/// Relative tolerance used to detect degenerate couplings.
pub const TOL_SINGULAR: f64 = 1e-9;

/// Radius (in units of σ) where the vortex/non-vortex amplitude ratio peaks.
pub const RHO_STAR: f64 = FRAC_1_SQRT_2;

/// Value of `a` above which the ratio `f(ρ)` crosses 1 somewhere, i.e. the
/// minimum group velocity reaches zero for `S = 0` or `S = π`.
pub fn degeneracy_threshold() -> f64 {
    (2.0 * E).sqrt()
}

/// Dimensionless control-field and medium configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumParams {
    /// Relative strength of the vortex beams.
    pub a: f64,
    /// Half the phase difference between the two non-vortex beams.
    pub s: f64,
    /// Winding number of the vortex control beams.
    pub l: i32,
    /// Optical density.
    pub alpha: f64,
    /// Scaled probe detuning `ΔωL/v₀(0)`.
    pub xi: f64,
    /// `v₀(0)/c`; contributes a global phase only.
    #[serde(default)]
    pub epsilon: f64,
    /// `γL/v₀(0)`; only the exact oracle uses it.
    #[serde(default = "default_gamma_tilde")]
    pub gamma_tilde: f64,
    /// Scaled two-photon detunings `δⱼL/v₀(0)`.
    #[serde(default)]
    pub delta_tilde: [f64; 2],
    /// Drop the non-adiabatic loss terms (the `α → ∞` limit).
    #[serde(default)]
    pub lossless: bool,
}

fn default_gamma_tilde() -> f64 {
    1e4
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            s: 0.0,
            l: 1,
            alpha: 100.0,
            xi: 0.0,
            epsilon: 0.0,
            gamma_tilde: default_gamma_tilde(),
            delta_tilde: [0.0, 0.0],
            lossless: false,
        }
    }
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.s, self.alpha, self.xi, self.epsilon, self.gamma_tilde]
            .iter()
            .chain(self.delta_tilde.iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        if self.a < 0.0 {
            return Err(Error::InvalidInput(format!("a must be >= 0, got {}", self.a)));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidInput(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidInput(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.gamma_tilde <= 0.0 {
            return Err(Error::InvalidInput(format!("gamma_tilde must be > 0, got {}", self.gamma_tilde)));
        }
        Ok(())
    }

    /// Coefficient `2/α` of the non-adiabatic loss terms, zero when lossless.
    pub fn loss_rate(&self) -> f64 {
        if self.lossless {
            0.0
        } else {
            2.0 / self.alpha
        }
    }

    /// The adiabaticity number `2ξ²/α`.
    pub fn adiabaticity(&self) -> f64 {
        2.0 * self.xi * self.xi / self.alpha
    }

    pub fn has_two_photon_detuning(&self) -> bool {
        self.delta_tilde != [0.0, 0.0]
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be finite and >= 0, got {rho}")))
    }
}

/// `|Ω₁₁|/|Ω₁₂| = a·ρ·exp(−ρ²)` for a first-order Laguerre–Gaussian vortex beam.
pub fn lg_ratio(rho: f64, a: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(a * rho * (-rho * rho).exp())
}

/// Maximum of [`lg_ratio`] over all radii, attained at [`RHO_STAR`].
pub fn max_lg_ratio(a: f64) -> f64 {
    a * (-0.5f64).exp() * FRAC_1_SQRT_2
}

/// Coupling regime of the double-tripod scheme at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Generic,
    /// Rabi matrix rank-deficient: equivalent to a double-Λ system.
    DoubleLambda,
    /// Two uncoupled tripods.
    IndependentTripods,
    /// No vortex-beam intensity (uncoupled tripods on the beam axis).
    VortexCore,
}

/// Control Rabi frequencies `Ω̃ᵢⱼ` at one point, normalized to `|Ω̃₁₂| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiMatrix(CMat2);

impl RabiMatrix {
    pub fn new(ratio: f64, phi: f64, l: i32, s: f64) -> Self {
        let lphi = l as f64 * phi;
        Self(CMat2::new(
            Complex64::from_polar(ratio, lphi),
            ONE,
            Complex64::from_polar(1.0, -2.0 * s),
            Complex64::from_polar(ratio, -lphi),
        ))
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn det(&self) -> Complex64 {
        linalg::det(&self.0)
    }

    /// Scale used for the relative singularity tests: `Σ|Ω̃ᵢⱼ|²/2`.
    fn scale(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>() * 0.5
    }

    pub fn regime(&self) -> Regime {
        let vortex = self.entry(0, 0).norm();
        if vortex < TOL_SINGULAR {
            return Regime::VortexCore;
        }
        let scale = self.scale();
        let crossing =
            self.entry(0, 0) * self.entry(1, 0).conj() + self.entry(0, 1) * self.entry(1, 1).conj();
        if crossing.norm() < TOL_SINGULAR * scale {
            return Regime::IndependentTripods;
        }
        if self.det().norm() < TOL_SINGULAR * scale {
            return Regime::DoubleLambda;
        }
        Regime::Generic
    }
}

pub fn rabi_matrix(rho: f64, phi: f64, params: &MediumParams) -> Result<RabiMatrix> {
    let f = lg_ratio(rho, params.a)?;
    Ok(RabiMatrix::new(f, phi, params.l, params.s))
}

/// Total control Rabi frequency `√(|Ω₁₂|² + |Ω₁₁|²)` in units of `|Ω₁₂|`.
pub fn total_rabi(rho: f64, params: &MediumParams) -> Result<f64> {
    let f = lg_ratio(rho, params.a)?;
    Ok((1.0 + f * f).sqrt())
}

/// Group-velocity matrix `ṽ = Ω̃Ω̃†` in units of `v₀(0)`.
pub fn velocity_matrix(rho: f64, phi: f64, params: &MediumParams) -> Result<CMat2> {
    let rabi = rabi_matrix(rho, phi, params)?;
    Ok(rabi.0 * rabi.0.adjoint())
}

/// Eigenstructure of the group-velocity matrix at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityDecomposition {
    pub v_plus: f64,
    pub v_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    /// `atan(|Ω₁₁|/|Ω₁₂|)`.
    pub theta_mix: f64,
    /// `v₀(ρ)/v₀(0) = 1 + f²`.
    pub v0_local: f64,
}

/// `(v₊, v₋) = 1 + f² ± 2f·cos S`, without any degeneracy check.
pub fn velocity_pair(ratio: f64, s: f64) -> (f64, f64) {
    let base = 1.0 + ratio * ratio;
    let split = 2.0 * ratio * s.cos();
    (base + split, base - split)
}

pub fn eigen_velocities(rho: f64, params: &MediumParams) -> Result<VelocityDecomposition> {
    let f = lg_ratio(rho, params.a)?;
    let (v_plus, v_minus) = velocity_pair(f, params.s);
    let v0_local = 1.0 + f * f;
    let v_min = v_plus.min(v_minus);
    if v_min < TOL_SINGULAR * v0_local {
        return Err(Error::DegenerateVelocity { rho, v_min });
    }
    Ok(VelocityDecomposition {
        v_plus,
        v_minus,
        u_plus: 1.0 / v_plus,
        u_minus: 1.0 / v_minus,
        theta_mix: f.atan(),
        v0_local,
    })
}

/// Two-photon detuning matrix `D̃ = Ω̃ δ̃ Ω̃⁻¹`.
pub fn detuning_matrix(rho: f64, phi: f64, params: &MediumParams) -> Result<CMat2> {
    let rabi = rabi_matrix(rho, phi, params)?;
    let det_abs = rabi.det().norm();
    let inv = match linalg::inverse(&rabi.0) {
        Some(inv) if det_abs >= TOL_SINGULAR * rabi.scale() => inv,
        _ => return Err(Error::SingularRabi { rho, det_abs }),
    };
    let [d1, d2] = params.delta_tilde;
    let delta = CMat2::from_diagonal(&CVec2::new(c(d1), c(d2)));
    Ok(rabi.0 * delta * inv)
}

/// Coupling regime at radius `rho`; the conditions do not depend on azimuth.
pub fn classify_regime(rho: f64, params: &MediumParams) -> Result<Regime> {
    Ok(rabi_matrix(rho, 0.0, params)?.regime())
}
