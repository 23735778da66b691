use std::path::Path;

use finsler_hardy::families::FamilyConfig;
use finsler_hardy::quadrature::QuadratureSpec;
use finsler_hardy::riccati::PairConfig;
use finsler_hardy::sharpness::{OracleConfig, SweepConfig};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::CliError;

fn default_anchor() -> f64 {
    1.0
}

/// Log-spaced grid `[min, max]` with `count` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn nodes(&self) -> Result<Vec<f64>, CliError> {
        if !(self.min > 0.0 && self.max > self.min && self.count >= 2) {
            return Err(CliError::Config(format!("grid needs 0 < min < max and count >= 2, got {self:?}")));
        }
        let ratio = self.max / self.min;
        Ok((0..self.count).map(|i| self.min * ratio.powf(i as f64 / (self.count - 1) as f64)).collect())
    }
}

fn default_radii() -> Grid {
    Grid { min: 1e-3, max: 10.0, count: 100 }
}

fn default_oracle_tol() -> f64 {
    1e-6
}

fn default_bound_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    pub family: FamilyConfig,
    pub eps: f64,
    /// Profile radii (`|x|` or `arctanh |x|`).
    #[serde(default = "default_radii")]
    pub radii: Grid,
    /// Largest relative closed-form vs engine deviation (dual-number path).
    #[serde(default = "default_oracle_tol")]
    pub oracle_tolerance: f64,
    #[serde(default = "default_bound_tol")]
    pub bound_tolerance: f64,
}

fn default_residual_grid() -> Grid {
    Grid { min: 0.1, max: 1e3, count: 10_000 }
}

fn default_residual_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiConfig {
    pub pair: PairConfig,
    #[serde(default = "default_residual_grid")]
    pub grid: Grid,
    /// The pair is accepted when every residual is `≥ −tolerance`.
    #[serde(default = "default_residual_tol")]
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub samples: usize,
    /// Agreement threshold in standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
}

fn default_sigmas() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientConfig {
    pub family: FamilyConfig,
    pub eps: f64,
    pub pair: PairConfig,
    pub knots: [f64; 4],
    #[serde(default = "default_anchor")]
    pub anchor: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub monte_carlo: Option<MonteCarloConfig>,
    pub seed: Option<u64>,
}

/// Reads a TOML file; unknown keys are rejected by the target types.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Resolves tabulated-pair paths against the directory of the config file.
pub fn resolve_pair(pair: &mut PairConfig, config_path: &Path) {
    if let PairConfig::Tabulated { path, .. } = pair {
        if path.is_relative() {
            if let Some(dir) = config_path.parent() {
                *path = dir.join(&*path);
            }
        }
    }
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig, CliError> {
    let mut c: SweepConfig = load(path)?;
    resolve_pair(&mut c.pair, path);
    Ok(c)
}

pub fn load_oracle(path: &Path) -> Result<OracleConfig, CliError> {
    let mut c: OracleConfig = load(path)?;
    for case in &mut c.cases {
        resolve_pair(&mut case.sweep.pair, path);
    }
    Ok(c)
}
