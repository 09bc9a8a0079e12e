//! Ground-truth propagators used to check the closed-form transmissions.
//!
//! [`exact_generator`] eliminates the atomic coherences from the linear-response
//! equations without any adiabatic step; [`analytic_generator`] is the
//! second-order adiabatic result assembled by direct matrix inversion; and
//! [`ode_propagate`] integrates `dE/dz̃ = iG(z̃)E` numerically.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat2, CVec2, I, ZERO};
use crate::medium::{eigen_velocities, rabi_matrix, velocity_matrix, MediumParams, TOL_SINGULAR};
use crate::transfer::TransferResult;

/// Condition number above which an elimination step is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// z-evolution generator `G` with `dE/dz̃ = iGE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator(pub CMat2);

impl Generator {
    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.0, tol)
    }

    /// Propagator across the whole cloud, `exp(iG)`.
    pub fn propagator(&self) -> CMat2 {
        linalg::expm(&(self.0 * I))
    }
}

fn checked_inverse(m: &CMat2) -> Result<CMat2> {
    let condition = linalg::condition_number(m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularElimination { condition });
    }
    linalg::inverse(m).ok_or(Error::SingularElimination { condition })
}

/// Generator from the exact monochromatic solve of the atom-light equations.
///
/// With `Δω` the probe detuning and the excited-state decay kept at finite
/// `γ̃`, eliminating both coherences gives
/// `G = ξε − [(ξ/γ̃ + i)(2/α) + Ω̃(δ̃ − ξ)⁻¹Ω̃†]⁻¹`.
/// At zero two-photon detuning this is evaluated as
/// `ξε + ξ[ṽ − ξ(ξ/γ̃ + i)(2/α)]⁻¹`, which stays finite at `ξ = 0`.
pub fn exact_generator(rho: f64, phi: f64, params: &MediumParams) -> Result<Generator> {
    if !(params.gamma_tilde > 0.0) {
        return Err(Error::InvalidInput("gamma_tilde must be > 0".into()));
    }
    let xi = params.xi;
    let phase = CMat2::identity() * c(xi * params.epsilon);
    let damping = Complex64::new(xi / params.gamma_tilde, 1.0) * params.loss_rate();

    if !params.has_two_photon_detuning() {
        if xi == 0.0 {
            return Ok(Generator(CMat2::zeros()));
        }
        let v = velocity_matrix(rho, phi, params)?;
        let m = v - CMat2::identity() * (damping * xi);
        return Ok(Generator(phase + checked_inverse(&m)? * c(xi)));
    }

    let rabi = *rabi_matrix(rho, phi, params)?.matrix();
    let mut inv_detuning = CMat2::zeros();
    for (j, &d) in params.delta_tilde.iter().enumerate() {
        let gap = d - xi;
        if gap.abs() < TOL_SINGULAR {
            return Err(Error::InvalidInput(format!(
                "two-photon detuning {d} coincides with the probe detuning"
            )));
        }
        inv_detuning[(j, j)] = c(1.0 / gap);
    }
    let m = CMat2::identity() * damping + rabi * inv_detuning * rabi.adjoint();
    Ok(Generator(phase - checked_inverse(&m)?))
}

/// Second-order adiabatic generator `ξε + ξṽ⁻¹ + i(2ξ²/α)ṽ⁻²`.
pub fn analytic_generator(rho: f64, phi: f64, params: &MediumParams) -> Result<Generator> {
    if params.has_two_photon_detuning() {
        return Err(Error::UnsupportedDetuning(params.delta_tilde));
    }
    // Same degeneracy contract as the Pauli-form path.
    eigen_velocities(rho, params)?;
    let xi = params.xi;
    let v = velocity_matrix(rho, phi, params)?;
    let v_inv = linalg::inverse(&v).ok_or(Error::DegenerateVelocity { rho, v_min: 0.0 })?;
    let g = CMat2::identity() * c(xi * params.epsilon)
        + v_inv * c(xi)
        + v_inv * v_inv * (I * (params.loss_rate() * xi * xi));
    Ok(Generator(g))
}

/// Classical fixed-step RK4 for `dE/dz̃ = iG(z̃)E` over `z̃ ∈ [0, 1]`.
pub fn ode_propagate<F>(generator: F, e0: CVec2, steps: usize) -> Result<CVec2>
where
    F: Fn(f64) -> CMat2,
{
    if steps < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 steps, got {steps}")));
    }
    let h = 1.0 / steps as f64;
    let rhs = |z: f64, e: &CVec2| generator(z) * e * I;
    let mut e = e0;
    for n in 0..steps {
        let z = n as f64 * h;
        let k1 = rhs(z, &e);
        let k2 = rhs(z + 0.5 * h, &(e + k1 * c(0.5 * h)));
        let k3 = rhs(z + 0.5 * h, &(e + k2 * c(0.5 * h)));
        let k4 = rhs(z + h, &(e + k3 * c(h)));
        e += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
    }
    Ok(e)
}

/// Observed order of [`ode_propagate`] for a constant generator: the negated
/// least-squares slope of `log(error)` against `log(steps)`, with the error
/// measured against `exp(iG)e₀`.
pub fn convergence_order(g: &CMat2, e0: CVec2, steps: &[usize]) -> Result<f64> {
    if steps.len() < 2 {
        return Err(Error::InvalidInput("need at least two step counts".into()));
    }
    let reference = linalg::expm(&(g * I)) * e0;
    let mut points = Vec::with_capacity(steps.len());
    for &n in steps {
        let e = ode_propagate(|_| *g, e0, n)?;
        let err = (e - reference).norm();
        if !(err > 0.0) {
            return Err(Error::InvalidInput(format!("zero error at {n} steps")));
        }
        points.push(((n as f64).ln(), err.ln()));
    }
    Ok(-slope(&points))
}

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Transmissions from the exact generator, for a probe entering in component 1.
pub fn exact_transmissions(rho: f64, phi: f64, params: &MediumParams) -> Result<TransferResult> {
    let u = exact_generator(rho, phi, params)?.propagator();
    let out = u * CVec2::new(linalg::ONE, ZERO);
    Ok(TransferResult::from_amplitudes(out[0], out[1]))
}

/// Max-entry distance between the exact and the analytic generators.
pub fn generator_discrepancy(rho: f64, phi: f64, params: &MediumParams) -> Result<f64> {
    let exact = exact_generator(rho, phi, params)?;
    let analytic = analytic_generator(rho, phi, params)?;
    Ok(linalg::norm_max(&(exact.0 - analytic.0)))
}
