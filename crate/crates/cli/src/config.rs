//! Configuration documents (TOML) for each subcommand.
//!
//! Scans accept a range string `"start:stop:count"`, an explicit array, or a
//! single number. Profiles are tables tagged by `family`:
//!
//! ```toml
//! [profile]
//! family = "bent"          # tilted | fold | bent | bump | line
//! alpha_plus = 0.5
//! alpha_minus = 1.0
//! ```
//!
//! Iwatsuka profiles `b` and `w` are arrays of terms tagged by `type`
//! (`step`, `bump`, `exp-decay`, `poly-exp`).

use std::path::Path;

use magband::assembly::Grid;
use magband::geometry::CurveFamily;
use magband::iwatsuka::{CertificateOptions, Profile};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A scan: range string, explicit list, or single value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scan {
    Single(f64),
    List(Vec<f64>),
    Range(String),
}

impl Scan {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Scan::Single(v) => Ok(vec![*v]),
            Scan::List(v) => Ok(v.clone()),
            Scan::Range(s) => parse_range(s),
        }
    }
}

/// Parses `start:stop:count` (inclusive endpoints) or a single number.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("malformed range {text:?}; expected start:stop:count"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse().map_err(|_| bad())?]),
        [start, stop, count] => {
            let start: f64 = start.parse().map_err(|_| bad())?;
            let stop: f64 = stop.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            if count == 0 || !start.is_finite() || !stop.is_finite() || (count == 1 && start != stop) {
                return Err(bad());
            }
            Ok(magband::bands::linspace(start, stop, count))
        }
        _ => Err(bad()),
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Full,
    Effective,
    Halfplane,
    Transverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    pub b0: f64,
    #[serde(default)]
    pub a: Option<f64>,
    /// Half-plane slope.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub profile: Option<CurveFamily>,
    pub xi: Scan,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_flat_tol")]
    pub flat_tol: f64,
    /// Compare the scan ends with the straight-layer levels (bent profiles).
    #[serde(default)]
    pub match_asymptotes: bool,
    #[serde(default)]
    pub grid: Grid,
}

fn default_model() -> Model {
    Model::Full
}

fn default_k() -> usize {
    3
}

fn default_flat_tol() -> f64 {
    magband::bands::DEFAULT_FLAT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BottomConfig {
    pub b0: Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaConfig {
    Rational { p: u64, q: u64 },
    Irrational { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegeneracyConfig {
    /// Either `theta` or both `b0` and `a` (treated as irrational).
    #[serde(default)]
    pub theta: Option<ThetaConfig>,
    #[serde(default)]
    pub b0: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_count() -> usize {
    10
}

fn default_eps() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinConfig {
    pub profile: CurveFamily,
    pub b0: f64,
    #[serde(default)]
    pub xi: f64,
    pub a: Vec<f64>,
    #[serde(default)]
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IwatsukaConfig {
    pub b0: f64,
    pub alpha: f64,
    pub x1: f64,
    #[serde(default)]
    pub b: Profile,
    #[serde(default)]
    pub w: Profile,
    pub xi: Scan,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Landau index of the certified band.
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub xi_large: Option<f64>,
    #[serde(default)]
    pub certificate: CertificateOptions,
    /// Scan grid; chosen from the scan window when absent.
    #[serde(default)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub profile: CurveFamily,
    pub a: f64,
    pub b0: f64,
}
