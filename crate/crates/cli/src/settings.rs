//! Resolved per-command settings. Defaults are overlaid by the matching
//! `[command]` table of the config file, then by command-line flags.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use chiral_core::lattice::Boundary;
use chiral_core::recovery::{KernelShape, Mollifier, ScalingSchedule, WallConfig, DEFAULT_RADIUS};
use chiral_core::relaxation::Method;

use crate::error::CliError;

const S: f64 = FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridBoundary {
    Open,
    Periodic,
    PeriodicY,
}

impl From<GridBoundary> for Boundary {
    fn from(b: GridBoundary) -> Boundary {
        match b {
            GridBoundary::Open => Boundary::Open,
            GridBoundary::Periodic => Boundary::Periodic,
            GridBoundary::PeriodicY => Boundary::PeriodicY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Quartic,
    Polynomial,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RelaxEdges {
    /// Frozen chiralities on the left and right columns, periodic in y.
    Fixed,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Sharp,
    Random,
    Ferromagnet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Gd,
    Momentum,
    Cg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateSettings {
    pub chi: [f64; 2],
    pub alpha: f64,
    pub l: f64,
    pub nx: usize,
    pub ny: usize,
    pub boundary: GridBoundary,
    pub theta0: f64,
}

impl Default for GroundStateSettings {
    fn default() -> Self {
        GroundStateSettings {
            chi: [S, S],
            alpha: 7.92,
            l: 0.01,
            nx: 32,
            ny: 32,
            boundary: GridBoundary::Open,
            theta0: 0.0,
        }
    }
}

/// `ε_n = eps0·2^{−n}` unless explicit `eps` (and optionally `delta`) lists are given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WallSettings {
    pub eps0: f64,
    pub levels: usize,
    pub exponent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    pub wall_angle: f64,
    pub kernel: KernelKind,
    pub power: u32,
    pub radius: f64,
}

impl Default for WallSettings {
    fn default() -> Self {
        WallSettings {
            eps0: 0.08,
            levels: 4,
            exponent: 0.6,
            eps: None,
            delta: None,
            wall_angle: 0.0,
            kernel: KernelKind::Quartic,
            power: 4,
            radius: DEFAULT_RADIUS,
        }
    }
}

impl WallSettings {
    pub fn schedule(&self) -> Result<ScalingSchedule, CliError> {
        let s = match (&self.eps, &self.delta) {
            (Some(e), Some(d)) => {
                if e.len() != d.len() {
                    return Err(CliError::Config(format!(
                        "eps and delta lists differ in length ({} vs {})",
                        e.len(),
                        d.len()
                    )));
                }
                let pairs: Vec<(f64, f64)> = e.iter().copied().zip(d.iter().copied()).collect();
                ScalingSchedule::from_pairs(&pairs)?
            }
            (Some(e), None) => ScalingSchedule::from_eps(e, self.exponent)?,
            (None, Some(_)) => return Err(CliError::Config("delta list needs a matching eps list".into())),
            (None, None) => ScalingSchedule::geometric(self.eps0, self.levels, self.exponent)?,
        };
        Ok(s)
    }

    pub fn wall(&self) -> WallConfig {
        WallConfig::canonical_rotated(self.wall_angle)
    }

    pub fn mollifier(&self) -> Result<Mollifier, CliError> {
        let shape = match self.kernel {
            KernelKind::Quartic => KernelShape::Polynomial { power: 4 },
            KernelKind::Polynomial => KernelShape::Polynomial { power: self.power },
            KernelKind::Exponential => KernelShape::Exponential,
        };
        Ok(Mollifier::new(shape, self.radius)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxSettings {
    pub nx: usize,
    pub ny: usize,
    pub eps: f64,
    /// Unset: the commensurate value for fixed edges, 0.1 for periodic grids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub chi_left: [f64; 2],
    pub chi_right: [f64; 2],
    pub boundary: RelaxEdges,
    /// Unset: sharp for fixed edges, random for periodic grids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<StartKind>,
    pub max_iters: usize,
    pub step: f64,
    pub tol_grad: f64,
    pub method: MethodKind,
    pub momentum: f64,
    pub seed: u64,
    pub theta0: f64,
}

impl Default for RelaxSettings {
    fn default() -> Self {
        RelaxSettings {
            nx: 64,
            ny: 29,
            eps: 0.02,
            delta: None,
            chi_left: [-S, S],
            chi_right: [S, S],
            boundary: RelaxEdges::Fixed,
            start: None,
            max_iters: 5000,
            step: 1e-2,
            tol_grad: 1e-9,
            method: MethodKind::Cg,
            momentum: 0.9,
            seed: 0,
            theta0: 0.0,
        }
    }
}

impl RelaxSettings {
    pub fn method(&self) -> Method {
        match self.method {
            MethodKind::Gd => Method::GradientDescent,
            MethodKind::Momentum => Method::Momentum { momentum: self.momentum },
            MethodKind::Cg => Method::ConjugateGradient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyScanSettings {
    /// Stored spin field; the sharp canonical wall is used when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub wall_angle: f64,
    pub resolution: usize,
    pub angle_min: f64,
    pub angle_max: f64,
    pub count: usize,
}

impl Default for EntropyScanSettings {
    fn default() -> Self {
        EntropyScanSettings {
            field: None,
            delta: None,
            wall_angle: 0.0,
            resolution: 64,
            angle_min: 0.0,
            angle_max: PI,
            count: 37,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
    /// Overrides the `alpha`/`delta` recorded in the field file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub threshold: f64,
}

impl Default for DiagnoseSettings {
    fn default() -> Self {
        DiagnoseSettings {
            field: None,
            delta: None,
            threshold: chiral_core::recovery::COUNT_THRESHOLD,
        }
    }
}

/// Top-level keys of a config file besides the per-command tables.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(rename = "ground-state")]
    pub ground_state: Option<toml::Table>,
    #[serde(rename = "wall-energy")]
    pub wall_energy: Option<toml::Table>,
    pub relax: Option<toml::Table>,
    #[serde(rename = "entropy-scan")]
    pub entropy_scan: Option<toml::Table>,
    #[serde(rename = "gamma-table")]
    pub gamma_table: Option<toml::Table>,
    pub diagnose: Option<toml::Table>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Settings from an optional config table, falling back to defaults.
pub fn from_table<T: Default + for<'de> Deserialize<'de>>(section: &str, t: Option<toml::Table>) -> Result<T, CliError> {
    match t {
        None => Ok(T::default()),
        Some(t) => t
            .try_into()
            .map_err(|e| CliError::Config(format!("[{section}]: {e}"))),
    }
}
