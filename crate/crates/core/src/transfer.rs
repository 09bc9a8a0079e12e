//! Closed-form propagation of the two-component probe through the cloud.
//!
//! For a monochromatic probe the field obeys `∂E/∂z̃ = i(K₀ + Kₓσₓ + K_yσ_y)E`,
//! so the exit field is a 2×2 matrix exponential with a closed Pauli form.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat2, I, ONE};
use crate::medium::{eigen_velocities, MediumParams};

/// Adiabaticity number `2ξ²/α` above which the second-order loss expansion
/// is flagged as unreliable.
pub const ADIABATICITY_WARN: f64 = 0.2;

/// Propagation generator in Pauli form, each coefficient multiplied by `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCoefficients {
    pub k0: Complex64,
    pub kx: Complex64,
    pub ky: Complex64,
}

/// Which root of `Kₓ² + K_y²` to use for `K⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Principal,
    Flipped,
}

impl KCoefficients {
    pub const ZERO: Self = Self { k0: linalg::ZERO, kx: linalg::ZERO, ky: linalg::ZERO };

    pub fn kperp(&self) -> Complex64 {
        self.kperp_on(Branch::Principal)
    }

    pub fn kperp_on(&self, branch: Branch) -> Complex64 {
        let root = (self.kx * self.kx + self.ky * self.ky).sqrt();
        match branch {
            Branch::Principal => root,
            Branch::Flipped => -root,
        }
    }

    /// `K₀I + Kₓσₓ + K_yσ_y`.
    pub fn generator(&self) -> CMat2 {
        CMat2::identity() * self.k0 + linalg::sigma_x() * self.kx + linalg::sigma_y() * self.ky
    }
}

/// Transmission amplitudes for a probe entering in the first component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferResult {
    #[serde(serialize_with = "ser_complex")]
    pub t1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub t2: Complex64,
    pub i1: f64,
    pub i2: f64,
    /// Set when `2ξ²/α` exceeds [`ADIABATICITY_WARN`].
    pub adiabatic_warning: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl TransferResult {
    pub fn from_amplitudes(t1: Complex64, t2: Complex64) -> Self {
        Self { t1, t2, i1: t1.norm_sqr(), i2: t2.norm_sqr(), adiabatic_warning: false }
    }

    pub fn total_intensity(&self) -> f64 {
        self.i1 + self.i2
    }
}

/// Pauli coefficients of the generator at one point of the cross-section.
///
/// Only the zero two-photon detuning case has a closed form; nonzero detunings
/// go through [`crate::oracle`].
pub fn k_coefficients(rho: f64, phi: f64, params: &MediumParams) -> Result<KCoefficients> {
    if params.has_two_photon_detuning() {
        return Err(Error::UnsupportedDetuning(params.delta_tilde));
    }
    let xi = params.xi;
    if xi == 0.0 {
        return Ok(KCoefficients::ZERO);
    }
    let vel = eigen_velocities(rho, params)?;
    let (up, um) = (vel.u_plus, vel.u_minus);
    let loss = params.loss_rate() * xi;
    let k0 = c(xi * params.epsilon) + Complex64::new(up + um, loss * (up * up + um * um)) * (xi / 2.0);
    let radial = Complex64::new(up - um, loss * (up * up - um * um)) * (xi / 2.0);
    let angle = params.s + params.l as f64 * phi;
    Ok(KCoefficients { k0, kx: radial * angle.cos(), ky: -radial * angle.sin() })
}

/// Plane-wave wave numbers `K₀ ± K⊥` (times `L`).
pub fn dispersion(k: &KCoefficients) -> (Complex64, Complex64) {
    let kperp = k.kperp();
    (k.k0 + kperp, k.k0 - kperp)
}

/// Entrance-to-exit matrix `exp(i(K₀ + Kₓσₓ + K_yσ_y))`.
pub fn transfer_matrix(k: &KCoefficients) -> CMat2 {
    let kperp = k.kperp();
    let phase = (I * k.k0).exp();
    let rotation = CMat2::identity() * kperp.cos()
        + (linalg::sigma_x() * k.kx + linalg::sigma_y() * k.ky) * (I * linalg::sinc(kperp));
    rotation * phase
}

/// First column of the transfer matrix, evaluated on a chosen `K⊥` branch.
pub fn transmissions_from(k: &KCoefficients, branch: Branch) -> TransferResult {
    let kperp = k.kperp_on(branch);
    let phase = (I * k.k0).exp();
    let t1 = phase * kperp.cos();
    let t2 = I * (k.kx + I * k.ky) * phase * linalg::sinc(kperp);
    TransferResult::from_amplitudes(t1, t2)
}

pub fn transmissions(rho: f64, phi: f64, params: &MediumParams) -> Result<TransferResult> {
    let k = k_coefficients(rho, phi, params)?;
    let mut result = transmissions_from(&k, Branch::Principal);
    result.adiabatic_warning = !params.lossless && params.adiabaticity() > ADIABATICITY_WARN;
    Ok(result)
}

/// Leading term of `T₂` in powers of `ρ`, valid near the vortex core.
pub fn t2_small_rho(rho: f64, phi: f64, params: &MediumParams) -> Complex64 {
    let xi = params.xi;
    let loss = params.loss_rate();
    let amplitude = -2.0 * I * xi * params.a * rho * params.s.cos();
    let exponent =
        I * (-(params.l as f64) * phi - params.s + xi * params.epsilon) + I * xi * (ONE + I * (loss * xi));
    amplitude * exponent.exp() * (ONE + I * (2.0 * loss * xi))
}
