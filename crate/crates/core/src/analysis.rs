//! Derived quantities: the swap detuning, radial transmission scans, azimuthal
//! winding spectra of the generated component, and the validity report.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::medium::{self, velocity_pair, MediumParams, RHO_STAR, TOL_SINGULAR};
use crate::transfer;

pub const DEFAULT_RHO_MAX: f64 = 3.0;
pub const DEFAULT_RHO_POINTS: usize = 601;
pub const DEFAULT_M_MAX: usize = 8;
pub const DEFAULT_N_PHI: usize = 256;

/// Scan-record flag: the point sits on a degenerate velocity (no closed form).
pub const FLAG_DEGENERATE: u32 = 1;
/// Scan-record flag: `2ξ²/α` exceeds the adiabaticity warning level.
pub const FLAG_ADIABATICITY: u32 = 2;

/// Detuning `ξ*` for which the two polariton branches accumulate a relative
/// phase of exactly π at [`RHO_STAR`].
pub fn solve_xi_condition(a: f64, s: f64) -> Result<f64> {
    let f = medium::lg_ratio(RHO_STAR, a)?;
    let (v_plus, v_minus) = velocity_pair(f, s);
    let v0 = 1.0 + f * f;
    if v_plus.min(v_minus) < TOL_SINGULAR * v0 {
        return Err(Error::NoSolution(format!(
            "a = {a}, S = {s}: one branch has zero group velocity at the peak radius"
        )));
    }
    let gap = (1.0 / v_minus - 1.0 / v_plus).abs();
    if gap < TOL_SINGULAR {
        return Err(Error::NoSolution(format!(
            "a = {a}, S = {s}: the eigen-velocities coincide at the peak radius"
        )));
    }
    Ok(PI / gap)
}

/// `points` uniformly spaced radii covering `[0, rho_max]`.
pub fn uniform_grid(rho_max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let h = rho_max / (points - 1) as f64;
            (0..points).map(|k| k as f64 * h).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRecord {
    pub rho: f64,
    pub i1: f64,
    pub i2: f64,
    /// `arg T₂` at zero azimuth.
    pub phase2: f64,
    pub flags: u32,
}

fn check_grid(rho_grid: &[f64]) -> Result<()> {
    if rho_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidInput("radii must be finite and >= 0".into()));
    }
    if rho_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radial grid must be strictly increasing".into()));
    }
    Ok(())
}

fn scan_point(rho: f64, params: &MediumParams) -> Result<ScanRecord> {
    match transfer::transmissions(rho, 0.0, params) {
        Ok(t) => Ok(ScanRecord {
            rho,
            i1: t.i1,
            i2: t.i2,
            phase2: t.t2.arg(),
            flags: if t.adiabatic_warning { FLAG_ADIABATICITY } else { 0 },
        }),
        Err(Error::DegenerateVelocity { .. }) => {
            Ok(ScanRecord { rho, i1: f64::NAN, i2: f64::NAN, phase2: f64::NAN, flags: FLAG_DEGENERATE })
        }
        Err(e) => Err(e),
    }
}

/// Transmissions along the `φ = 0` ray, one record per grid radius in order.
///
/// Degenerate points are flagged rather than aborting the scan.
pub fn radial_scan(params: &MediumParams, rho_grid: &[f64]) -> Result<Vec<ScanRecord>> {
    params.validate()?;
    check_grid(rho_grid)?;
    rho_grid.par_iter().map(|&rho| scan_point(rho, params)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub rho: f64,
    pub i2: f64,
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d12 - d01) / (x[2] - x[0]);
    if !(curvature < 0.0) {
        return None;
    }
    // y = y1 + b(x - x1) + curvature (x - x1)^2 locally, with b the slope at x1.
    let b = d01 + curvature * (x[1] - x[0]);
    let xv = x[1] - b / (2.0 * curvature);
    if xv < x[0] || xv > x[2] {
        return None;
    }
    Some((xv, y[1] - b * b / (4.0 * curvature)))
}

/// Location and height of the maximum of `i2`, refined by a parabola through
/// the grid maximum and its neighbours.
pub fn find_peak(scan: &[ScanRecord]) -> Result<Peak> {
    let (k, best) = scan
        .iter()
        .enumerate()
        .filter(|(_, r)| r.i2.is_finite())
        .fold(None::<(usize, &ScanRecord)>, |acc, (k, r)| match acc {
            Some((_, b)) if b.i2 >= r.i2 => acc,
            _ => Some((k, r)),
        })
        .ok_or_else(|| Error::InvalidInput("scan has no finite records".into()))?;
    let coarse = Peak { rho: best.rho, i2: best.i2 };
    if k == 0 || k + 1 >= scan.len() {
        return Ok(coarse);
    }
    let (l, r) = (&scan[k - 1], &scan[k + 1]);
    if !(l.i2.is_finite() && r.i2.is_finite()) {
        return Ok(coarse);
    }
    Ok(parabola_vertex([l.rho, best.rho, r.rho], [l.i2, best.i2, r.i2])
        .map(|(rho, i2)| Peak { rho, i2 })
        .unwrap_or(coarse))
}

/// Power per azimuthal winding number `m ∈ [−m_max, m_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OamSpectrum {
    pub m_max: usize,
    /// `powers[m + m_max]`; sums to 1 unless the field vanishes.
    pub powers: Vec<f64>,
    /// Unnormalized power captured in the window.
    pub total: f64,
}

impl OamSpectrum {
    pub fn power(&self, m: i64) -> f64 {
        let idx = m + self.m_max as i64;
        if idx < 0 {
            return 0.0;
        }
        self.powers.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn windings(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m_max = self.m_max as i64;
        self.powers.iter().enumerate().map(move |(i, &p)| (i as i64 - m_max, p))
    }

    /// Winding number carrying the most power.
    pub fn dominant(&self) -> i64 {
        self.windings().fold((0, f64::MIN), |acc, (m, p)| if p > acc.1 { (m, p) } else { acc }).0
    }
}

/// Azimuthal Fourier decomposition of uniformly sampled field values.
pub fn oam_spectrum(samples: &[Complex64], m_max: usize) -> Result<OamSpectrum> {
    let n = samples.len();
    if !n.is_power_of_two() || n < 4 * m_max.max(1) {
        return Err(Error::InvalidInput(format!(
            "need a power-of-two sample count >= 4·m_max, got {n} for m_max = {m_max}"
        )));
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / n as f64;
    let raw: Vec<f64> = (-(m_max as i64)..=m_max as i64)
        .map(|m| (buf[m.rem_euclid(n as i64) as usize] * norm).norm_sqr())
        .collect();
    let total: f64 = raw.iter().sum();
    let powers = if total > 0.0 { raw.iter().map(|p| p / total).collect() } else { raw };
    Ok(OamSpectrum { m_max, powers, total })
}

/// `T₂` on `n_phi` uniform azimuths at fixed radius.
pub fn sample_azimuth(rho: f64, params: &MediumParams, n_phi: usize) -> Result<Vec<Complex64>> {
    (0..n_phi)
        .map(|k| {
            let phi = TAU * k as f64 / n_phi as f64;
            transfer::transmissions(rho, phi, params).map(|t| t.t2)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    fn grade(value: f64, pass_below: f64, warn_below: f64) -> Self {
        if value < pass_below {
            Status::Pass
        } else if value < warn_below {
            Status::Warn
        } else {
            Status::Fail
        }
    }
}

/// Physical cloud length, beam width and wavelength, all in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalLengths {
    pub l_um: f64,
    pub sigma_um: f64,
    pub lambda_um: f64,
}

impl PhysicalLengths {
    /// `Lλ/σ²`, the phase picked up from transverse diffraction.
    pub fn diffraction_number(&self) -> f64 {
        self.l_um * self.lambda_um / (self.sigma_um * self.sigma_um)
    }
}

pub const ADIABATICITY_PASS: f64 = 0.1;
pub const ADIABATICITY_WARN: f64 = 0.5;
/// Twice `2π²`.
pub const OPTICAL_DENSITY_PASS: f64 = 40.0;
pub const OPTICAL_DENSITY_MIN: f64 = 2.0 * PI * PI;
pub const DEGENERACY_WARN: f64 = 0.1;
pub const DIFFRACTION_PASS: f64 = 0.5;
pub const DIFFRACTION_WARN: f64 = 1.0;

pub const NON_RESONANT_CAVEAT: &str = "off-resonant couplings to other excited hyperfine levels \
are not modelled; when the hyperfine splitting is not large compared with the detuning, the \
control Rabi frequencies and the decay rate, these couplings shift the transparency window and add losses";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    /// `2ξ²/α`.
    pub adiabaticity: f64,
    pub adiabaticity_status: Status,
    pub alpha: f64,
    pub optical_density_ok: bool,
    pub optical_density_status: Status,
    /// Minimum of `v₋/v₀(0)` over all radii.
    pub degeneracy_margin: f64,
    /// Minimum of `v₋/v₀(0)` over the scan grid.
    pub degeneracy_margin_grid: f64,
    pub degeneracy_status: Status,
    /// `Lλ/σ²` when physical lengths were supplied.
    pub diffraction_number: Option<f64>,
    pub diffraction_status: Option<Status>,
    /// `τ_pol/τ` using the true minimum group velocity; absent when it vanishes.
    pub lifetime_ratio: Option<f64>,
    /// `τ_pol/τ` assuming `v_min ≈ v₀(0)`.
    pub lifetime_ratio_approx: f64,
    pub caveat: String,
}

impl ConstraintReport {
    pub fn status(&self) -> Status {
        [
            Some(self.adiabaticity_status),
            Some(self.optical_density_status),
            Some(self.degeneracy_status),
            self.diffraction_status,
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(Status::Pass)
    }
}

/// Smallest `v₋/v₀(0) = 1 + f² − 2f|cos S|` over `f ∈ [0, f_max]`.
fn continuous_margin(a: f64, s: f64) -> f64 {
    let f_max = medium::max_lg_ratio(a);
    let cs = s.cos().abs();
    if f_max >= cs {
        1.0 - cs * cs
    } else {
        1.0 + f_max * f_max - 2.0 * f_max * cs
    }
}

/// Validity report for the adiabatic treatment and the medium parameters.
pub fn lifetime_report(
    params: &MediumParams,
    rho_grid: &[f64],
    physical: Option<&PhysicalLengths>,
) -> Result<ConstraintReport> {
    params.validate()?;
    check_grid(rho_grid)?;
    let adiabaticity = params.adiabaticity();
    let degeneracy_margin = continuous_margin(params.a, params.s);
    let degeneracy_margin_grid = rho_grid
        .iter()
        .map(|&rho| {
            let f = params.a * rho * (-rho * rho).exp();
            let (vp, vm) = velocity_pair(f, params.s);
            vp.min(vm)
        })
        .fold(f64::INFINITY, f64::min);
    let degeneracy_status = if degeneracy_margin < TOL_SINGULAR {
        Status::Fail
    } else if degeneracy_margin < DEGENERACY_WARN {
        Status::Warn
    } else {
        Status::Pass
    };
    let optical_density_status = if params.alpha >= OPTICAL_DENSITY_PASS {
        Status::Pass
    } else if params.alpha >= OPTICAL_DENSITY_MIN {
        Status::Warn
    } else {
        Status::Fail
    };
    let diffraction_number = physical.map(PhysicalLengths::diffraction_number);
    Ok(ConstraintReport {
        adiabaticity,
        adiabaticity_status: Status::grade(adiabaticity, ADIABATICITY_PASS, ADIABATICITY_WARN),
        alpha: params.alpha,
        optical_density_ok: optical_density_status == Status::Pass,
        optical_density_status,
        degeneracy_margin,
        degeneracy_margin_grid,
        degeneracy_status,
        diffraction_number,
        diffraction_status: diffraction_number.map(|d| Status::grade(d, DIFFRACTION_PASS, DIFFRACTION_WARN)),
        lifetime_ratio: (degeneracy_margin >= TOL_SINGULAR).then(|| adiabaticity / degeneracy_margin),
        lifetime_ratio_approx: adiabaticity,
        caveat: NON_RESONANT_CAVEAT.to_string(),
    })
}
