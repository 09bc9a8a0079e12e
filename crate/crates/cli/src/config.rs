//! JSON run configuration.
//!
//! Every section is optional; an empty document `{}` describes the reference
//! configuration (a = 1, S = 0, l = 1, α = 100, ξ at the swap condition).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinor_eit::analysis::{self, PhysicalLengths};
use spinor_eit::MediumParams;

use crate::CliError;

/// Upper bound on the number of parameter combinations in one sweep.
pub const MAX_SWEEP_COMBINATIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XiSpec {
    Value(f64),
    Keyword(XiKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiKeyword {
    /// Solve the π-swap condition at the peak radius for the configured a, S.
    Auto,
}

impl Default for XiSpec {
    fn default() -> Self {
        XiSpec::Keyword(XiKeyword::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "one_i32")]
    pub l: i32,
    #[serde(default = "hundred")]
    pub alpha: f64,
    #[serde(default)]
    pub xi: XiSpec,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_gamma_tilde")]
    pub gamma_tilde: f64,
    #[serde(default)]
    pub delta_tilde: [f64; 2],
    #[serde(default)]
    pub lossless: bool,
}

impl Default for MediumConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

fn one() -> f64 {
    1.0
}
fn one_i32() -> i32 {
    1
}
fn hundred() -> f64 {
    100.0
}
fn default_gamma_tilde() -> f64 {
    MediumParams::default().gamma_tilde
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_rho_max() -> f64 {
    analysis::DEFAULT_RHO_MAX
}
fn default_points() -> usize {
    analysis::DEFAULT_RHO_POINTS
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { rho_max: default_rho_max(), points: default_points() }
    }
}

impl ScanConfig {
    pub fn grid(&self) -> Vec<f64> {
        analysis::uniform_grid(self.rho_max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    #[serde(default = "default_map_phi")]
    pub n_phi: usize,
}

fn default_map_phi() -> usize {
    64
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { n_phi: default_map_phi() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * h })
            .collect()
    }
}

/// Axes left out are pinned to the medium values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Axis>,
}

impl SweepConfig {
    pub fn axes(&self) -> [(&'static str, Option<&Axis>); 4] {
        [
            ("s", self.s.as_ref()),
            ("a", self.a.as_ref()),
            ("alpha", self.alpha.as_ref()),
            ("xi", self.xi.as_ref()),
        ]
    }

    pub fn combinations(&self) -> u64 {
        self.axes().iter().filter_map(|(_, a)| a.map(|a| a.count as u64)).product()
    }
}

/// Tolerances applied by `validate`; defaults are the acceptance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    #[serde(default = "default_xi_star_range")]
    pub xi_star_range: [f64; 2],
    #[serde(default = "default_oracle_gamma")]
    pub oracle_gamma_tilde: f64,
    #[serde(default = "default_oracle_dev")]
    pub max_oracle_deviation: f64,
    #[serde(default = "default_slope_sweep")]
    pub oracle_gamma_sweep: Vec<f64>,
    #[serde(default = "default_slope_range")]
    pub oracle_slope_range: [f64; 2],
    #[serde(default = "default_ode_steps")]
    pub ode_steps: Vec<usize>,
    #[serde(default = "default_order_range")]
    pub ode_order_range: [f64; 2],
    #[serde(default = "default_ode_check_steps")]
    pub ode_check_steps: usize,
    #[serde(default = "default_ode_error")]
    pub max_ode_error: f64,
    #[serde(default = "default_unitarity")]
    pub max_unitarity_defect: f64,
    #[serde(default = "default_unitarity_phi")]
    pub unitarity_phi_points: usize,
    #[serde(default = "default_purity")]
    pub min_oam_purity: f64,
}

fn default_xi_star_range() -> [f64; 2] {
    [1.215, 1.225]
}
fn default_oracle_gamma() -> f64 {
    1e6
}
fn default_oracle_dev() -> f64 {
    1e-3
}
fn default_slope_sweep() -> Vec<f64> {
    vec![1e3, 1e4, 1e5, 1e6]
}
fn default_slope_range() -> [f64; 2] {
    [-1.1, -0.9]
}
fn default_ode_steps() -> Vec<usize> {
    vec![64, 128, 256]
}
fn default_order_range() -> [f64; 2] {
    [3.8, 4.2]
}
fn default_ode_check_steps() -> usize {
    1024
}
fn default_ode_error() -> f64 {
    1e-10
}
fn default_unitarity() -> f64 {
    1e-12
}
fn default_unitarity_phi() -> usize {
    64
}
fn default_purity() -> f64 {
    1.0 - 1e-10
}

impl Default for ValidationConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub medium: MediumConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalLengths>,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.inner();
            CliError::Config(format!("{origin}:{}:{}: field `{path}`: {inner}", inner.line(), inner.column()))
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Checks every range and fixes `ξ`, returning the configuration that the
    /// commands run (and embed in their reports).
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let m = &self.medium;
        let xi = match m.xi {
            XiSpec::Value(x) => x,
            XiSpec::Keyword(XiKeyword::Auto) => analysis::solve_xi_condition(m.a, m.s)
                .map_err(|e| invalid("medium.xi", format!("cannot resolve \"auto\": {e}")))?,
        };
        self.medium.xi = XiSpec::Value(xi);
        self.medium_params().validate().map_err(|e| invalid("medium", e))?;

        if !(self.scan.rho_max > 0.0 && self.scan.rho_max.is_finite()) {
            return Err(invalid("scan.rho_max", "must be finite and > 0"));
        }
        if self.scan.points < 2 {
            return Err(invalid("scan.points", "must be >= 2"));
        }
        if self.map.n_phi == 0 {
            return Err(invalid("map.n_phi", "must be >= 1"));
        }
        for (name, axis) in self.sweep.axes() {
            if let Some(axis) = axis {
                if axis.count < 2 {
                    return Err(invalid(&format!("sweep.{name}.count"), "must be >= 2"));
                }
                if !(axis.start.is_finite() && axis.stop.is_finite()) {
                    return Err(invalid(&format!("sweep.{name}"), "bounds must be finite"));
                }
            }
        }
        let v = &self.validation;
        if v.ode_steps.len() < 2 || v.ode_steps.iter().any(|&n| n < 16) || v.ode_check_steps < 16 {
            return Err(invalid("validation.ode_steps", "need >= 2 step counts, each >= 16"));
        }
        if v.oracle_gamma_sweep.len() < 2 || v.oracle_gamma_sweep.iter().any(|g| !(*g > 0.0)) {
            return Err(invalid("validation.oracle_gamma_sweep", "need >= 2 positive values"));
        }
        if !(v.oracle_gamma_tilde > 0.0) {
            return Err(invalid("validation.oracle_gamma_tilde", "must be > 0"));
        }
        if v.unitarity_phi_points == 0 {
            return Err(invalid("validation.unitarity_phi_points", "must be >= 1"));
        }
        if let Some(p) = &self.physical {
            if [p.l_um, p.sigma_um, p.lambda_um].iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(invalid("physical", "lengths must be finite and > 0"));
            }
        }
        Ok(self)
    }

    /// Medium parameters; `ξ` must already be resolved.
    pub fn medium_params(&self) -> MediumParams {
        let m = &self.medium;
        MediumParams {
            a: m.a,
            s: m.s,
            l: m.l,
            alpha: m.alpha,
            xi: match m.xi {
                XiSpec::Value(x) => x,
                XiSpec::Keyword(_) => f64::NAN,
            },
            epsilon: m.epsilon,
            gamma_tilde: m.gamma_tilde,
            delta_tilde: m.delta_tilde,
            lossless: m.lossless,
        }
    }
}
