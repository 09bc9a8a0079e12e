//! The five subcommands. Each has a pure part returning data (used by the
//! tests) and a `run_*` wrapper that writes artifacts and picks the exit code.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spinor_eit::analysis::{self, ConstraintReport, ScanRecord, Status};
use spinor_eit::linalg::{self, CVec2, I, ONE, ZERO};
use spinor_eit::medium::RHO_STAR;
use spinor_eit::{oracle, transfer, Error, MediumParams};

use crate::config::{RunConfig, MAX_SWEEP_COMBINATIONS};
use crate::output::{self, fmt_f64, Csv};
use crate::{exit, CliError};

pub const SCAN_HEADER: [&str; 5] = ["rho", "i1", "i2", "phase2", "flags"];
pub const MAP_HEADER: [&str; 4] = ["rho", "phi", "i2", "phase2"];
pub const SWEEP_HEADER: [&str; 7] = ["s", "a", "alpha", "xi", "rho_peak", "i2_peak", "i1_at_peak"];

// ---------------------------------------------------------------- check

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub config: RunConfig,
    pub report: ConstraintReport,
    pub status: Status,
}

pub fn check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let report = analysis::lifetime_report(&cfg.medium_params(), &cfg.scan.grid(), cfg.physical.as_ref())?;
    Ok(CheckReport { config: cfg.clone(), status: report.status(), report })
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Warn => "WARN",
        Status::Fail => "FAIL",
    }
}

pub fn render_check_table(r: &ConstraintReport) -> String {
    let mut t = String::new();
    let mut line = |name: &str, value: String, status: Option<Status>| {
        let st = status.map(status_word).unwrap_or("-");
        let _ = writeln!(t, "{name:<28} {value:>14}  {st}");
    };
    line("adiabaticity 2xi^2/alpha", format!("{:.6}", r.adiabaticity), Some(r.adiabaticity_status));
    line("optical density alpha", format!("{:.3}", r.alpha), Some(r.optical_density_status));
    line("degeneracy margin v-/v0", format!("{:.6}", r.degeneracy_margin), Some(r.degeneracy_status));
    line("  on scan grid", format!("{:.6}", r.degeneracy_margin_grid), None);
    match (r.diffraction_number, r.diffraction_status) {
        (Some(d), st) => line("diffraction L*lambda/sigma^2", format!("{d:.6}"), st),
        _ => line("diffraction L*lambda/sigma^2", "n/a".into(), None),
    }
    match r.lifetime_ratio {
        Some(x) => line("tau_pol/tau (true v_min)", format!("{x:.6}"), None),
        None => line("tau_pol/tau (true v_min)", "unbounded".into(), None),
    }
    line("tau_pol/tau (v_min ~ v0)", format!("{:.6}", r.lifetime_ratio_approx), None);
    let _ = writeln!(t, "{:<28} {:>14}  {}", "overall", "", status_word(r.status()));
    let _ = writeln!(t, "note: {}", r.caveat);
    t
}

pub fn run_check(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let report = check(cfg)?;
    print!("{}", render_check_table(&report.report));
    output::write_json(out, "check.json", &report)?;
    Ok(match report.status {
        Status::Pass => exit::OK,
        Status::Warn => exit::WARN,
        Status::Fail => exit::FAIL,
    })
}

// ---------------------------------------------------------------- scan

pub fn scan(cfg: &RunConfig) -> Result<Vec<ScanRecord>, CliError> {
    Ok(analysis::radial_scan(&cfg.medium_params(), &cfg.scan.grid())?)
}

pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut csv = Csv::new(&SCAN_HEADER);
    for r in records {
        csv.row(&[fmt_f64(r.rho), fmt_f64(r.i1), fmt_f64(r.i2), fmt_f64(r.phase2), r.flags.to_string()]);
    }
    csv.into_string()
}

pub fn run_scan(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let records = scan(cfg)?;
    let path = output::write_text(out, "scan.csv", &scan_csv(&records))?;
    output::write_text(out, "scan.gp", &output::scan_plot_script("scan.csv"))?;
    if let Ok(peak) = analysis::find_peak(&records) {
        println!("peak |T2|^2 = {:.6} at rho = {:.6}", peak.i2, peak.rho);
    }
    println!("wrote {} ({} rows)", path.display(), records.len());
    Ok(exit::OK)
}

// ---------------------------------------------------------------- map

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapRow {
    pub rho: f64,
    pub phi: f64,
    pub i2: f64,
    pub phase2: f64,
}

pub fn map(cfg: &RunConfig) -> Result<Vec<MapRow>, CliError> {
    let params = cfg.medium_params();
    let n_phi = cfg.map.n_phi;
    let rows: Result<Vec<Vec<MapRow>>, Error> = cfg
        .scan
        .grid()
        .par_iter()
        .map(|&rho| {
            (0..n_phi)
                .map(|k| {
                    let phi = TAU * k as f64 / n_phi as f64;
                    match transfer::transmissions(rho, phi, &params) {
                        Ok(t) => Ok(MapRow { rho, phi, i2: t.i2, phase2: t.t2.arg() }),
                        Err(Error::DegenerateVelocity { .. }) => {
                            Ok(MapRow { rho, phi, i2: f64::NAN, phase2: f64::NAN })
                        }
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn run_map(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let rows = map(cfg)?;
    let mut csv = Csv::new(&MAP_HEADER);
    for r in &rows {
        csv.numbers(&[r.rho, r.phi, r.i2, r.phase2]);
    }
    let path = output::write_text(out, "map.csv", &csv.into_string())?;
    output::write_text(out, "map.gp", &output::map_plot_script("map.csv"))?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(exit::OK)
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn within(name: &str, value: Option<f64>, min: Option<f64>, max: Option<f64>) -> Self {
        let pass =
            value.is_some_and(|v| v.is_finite() && min.is_none_or(|m| v >= m) && max.is_none_or(|m| v <= m));
        Self { name: name.to_string(), value, min, max, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub config: RunConfig,
    pub xi_star: Option<f64>,
    /// Largest |Δi1| or |Δi2| between the exact solve and the closed form.
    pub max_oracle_deviation: f64,
    /// `(γ̃, deviation)` pairs behind `oracle_gamma_slope`.
    pub oracle_deviation_by_gamma: Vec<[f64; 2]>,
    pub oracle_gamma_slope: f64,
    pub ode_convergence_order: Option<f64>,
    pub ode_max_error: f64,
    pub unitarity_defect_lossless: f64,
    pub oam_purity: Option<f64>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Max intensity deviation between the exact oracle at `gamma_tilde` and the
/// closed form along the scan grid (`φ = 0`); degenerate points are skipped.
pub fn oracle_deviation(params: &MediumParams, grid: &[f64], gamma_tilde: f64) -> Result<f64, Error> {
    let exact_params = MediumParams { gamma_tilde, ..*params };
    let per_point: Result<Vec<f64>, Error> = grid
        .par_iter()
        .map(|&rho| {
            let analytic = match transfer::transmissions(rho, 0.0, params) {
                Ok(t) => t,
                Err(Error::DegenerateVelocity { .. }) => return Ok(0.0),
                Err(e) => return Err(e),
            };
            let exact = oracle::exact_transmissions(rho, 0.0, &exact_params)?;
            Ok((exact.i1 - analytic.i1).abs().max((exact.i2 - analytic.i2).abs()))
        })
        .collect();
    Ok(per_point?.into_iter().fold(0.0, f64::max))
}

/// Largest `|i1 + i2 − 1|` with the loss terms switched off.
pub fn unitarity_defect(params: &MediumParams, grid: &[f64], n_phi: usize) -> f64 {
    let lossless = MediumParams { lossless: true, ..*params };
    grid.par_iter()
        .map(|&rho| {
            (0..n_phi)
                .filter_map(|k| {
                    let phi = TAU * k as f64 / n_phi as f64;
                    transfer::transmissions(rho, phi, &lossless).ok()
                })
                .map(|t| (t.i1 + t.i2 - 1.0).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn ode_max_error(params: &MediumParams, grid: &[f64], steps: usize) -> Result<f64, Error> {
    let e0 = CVec2::new(ONE, ZERO);
    let errs: Result<Vec<f64>, Error> = grid
        .par_iter()
        .map(|&rho| {
            let g = match oracle::analytic_generator(rho, 0.0, params) {
                Ok(g) => g.0,
                Err(Error::DegenerateVelocity { .. }) => return Ok(0.0),
                Err(e) => return Err(e),
            };
            let out = oracle::ode_propagate(|_| g, e0, steps)?;
            Ok((out - linalg::expm(&(g * I)) * e0).norm())
        })
        .collect();
    Ok(errs?.into_iter().fold(0.0, f64::max))
}

pub fn validate(cfg: &RunConfig) -> Result<ValidationReport, CliError> {
    let params = cfg.medium_params();
    let grid = cfg.scan.grid();
    let v = &cfg.validation;

    let xi_star = analysis::solve_xi_condition(params.a, params.s).ok();

    let max_oracle_deviation = oracle_deviation(&params, &grid, v.oracle_gamma_tilde)?;
    let mut oracle_deviation_by_gamma = Vec::with_capacity(v.oracle_gamma_sweep.len());
    for &g in &v.oracle_gamma_sweep {
        oracle_deviation_by_gamma.push([g, oracle_deviation(&params, &grid, g)?]);
    }
    let log_points: Vec<(f64, f64)> =
        oracle_deviation_by_gamma.iter().map(|[g, d]| (g.ln(), d.ln())).collect();
    let oracle_gamma_slope = oracle::slope(&log_points);

    let ode_convergence_order = oracle::analytic_generator(RHO_STAR, 0.0, &params)
        .and_then(|g| oracle::convergence_order(&g.0, CVec2::new(ONE, ZERO), &v.ode_steps))
        .ok();
    let ode_max_error = ode_max_error(&params, &grid, v.ode_check_steps)?;
    let unitarity_defect_lossless = unitarity_defect(&params, &grid, v.unitarity_phi_points);

    let samples = analysis::sample_azimuth(RHO_STAR, &params, analysis::DEFAULT_N_PHI);
    let oam_purity = samples
        .and_then(|s| analysis::oam_spectrum(&s, analysis::DEFAULT_M_MAX))
        .ok()
        .filter(|s| s.total > 0.0)
        .map(|s| s.power(-(params.l as i64)));

    let mut checks = vec![
        Check::within("xi_star", xi_star, Some(v.xi_star_range[0]), Some(v.xi_star_range[1])),
        Check::within("max_oracle_deviation", Some(max_oracle_deviation), None, Some(v.max_oracle_deviation)),
        Check::within(
            "oracle_gamma_slope",
            Some(oracle_gamma_slope),
            Some(v.oracle_slope_range[0]),
            Some(v.oracle_slope_range[1]),
        ),
        Check::within(
            "ode_convergence_order",
            ode_convergence_order,
            Some(v.ode_order_range[0]),
            Some(v.ode_order_range[1]),
        ),
        Check::within("ode_max_error", Some(ode_max_error), None, Some(v.max_ode_error)),
        Check::within(
            "unitarity_defect_lossless",
            Some(unitarity_defect_lossless),
            None,
            Some(v.max_unitarity_defect),
        ),
    ];
    if oam_purity.is_some() {
        checks.push(Check::within("oam_purity", oam_purity, Some(v.min_oam_purity), None));
    }

    Ok(ValidationReport {
        config: cfg.clone(),
        xi_star,
        max_oracle_deviation,
        oracle_deviation_by_gamma,
        oracle_gamma_slope,
        ode_convergence_order,
        ode_max_error,
        unitarity_defect_lossless,
        oam_purity,
        checks,
    })
}

pub fn run_validate(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let report = validate(cfg)?;
    for c in &report.checks {
        let value = c.value.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "none".into());
        println!("{:<28} {:>14}  {}", c.name, value, if c.pass { "pass" } else { "FAIL" });
    }
    output::write_json(out, "validate.json", &report)?;
    if report.passed() {
        Ok(exit::OK)
    } else {
        for c in report.failures() {
            eprintln!("validation failed: {}", c.name);
        }
        Ok(exit::FAIL)
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub a: f64,
    pub alpha: f64,
    pub xi: f64,
    pub rho_peak: f64,
    pub i2_peak: f64,
    pub i1_at_peak: f64,
}

pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let combos = cfg.sweep.combinations();
    if combos > MAX_SWEEP_COMBINATIONS {
        return Err(CliError::Config(format!(
            "sweep: {combos} combinations exceed the limit of {MAX_SWEEP_COMBINATIONS}"
        )));
    }
    let base = cfg.medium_params();
    let values = |axis: Option<&crate::config::Axis>, fixed: f64| {
        axis.map(|a| a.values()).unwrap_or_else(|| vec![fixed])
    };
    let sw = &cfg.sweep;
    let mut points = Vec::with_capacity(combos as usize);
    for &s in &values(sw.s.as_ref(), base.s) {
        for &a in &values(sw.a.as_ref(), base.a) {
            for &alpha in &values(sw.alpha.as_ref(), base.alpha) {
                for &xi in &values(sw.xi.as_ref(), base.xi) {
                    points.push(MediumParams { s, a, alpha, xi, ..base });
                }
            }
        }
    }
    let grid = cfg.scan.grid();
    points
        .par_iter()
        .map(|p| {
            p.validate()?;
            let scan = analysis::radial_scan(p, &grid)?;
            let (rho_peak, i2_peak, i1_at_peak) = match analysis::find_peak(&scan) {
                Ok(peak) => {
                    let i1 = transfer::transmissions(peak.rho, 0.0, p).map(|t| t.i1).unwrap_or(f64::NAN);
                    (peak.rho, peak.i2, i1)
                }
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            Ok(SweepRow { s: p.s, a: p.a, alpha: p.alpha, xi: p.xi, rho_peak, i2_peak, i1_at_peak })
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::from)
}

pub fn run_sweep(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let rows = sweep(cfg)?;
    let mut csv = Csv::new(&SWEEP_HEADER);
    for r in &rows {
        csv.numbers(&[r.s, r.a, r.alpha, r.xi, r.rho_peak, r.i2_peak, r.i1_at_peak]);
    }
    let path = output::write_text(out, "sweep.csv", &csv.into_string())?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(exit::OK)
}
