//! Run configuration: a JSON file with per-field defaults, overridden by
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Mean idler photon numbers of the reference curve family.
pub const DEFAULT_NBAR1: [f64; 5] = [1e-2, 1.0, 10.0, 100.0, 1e4];
pub const DEFAULT_T_STEPS: usize = 101;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            start: 0.0,
            stop: 1.0,
            count: DEFAULT_T_STEPS,
        }
    }
}

impl TGrid {
    /// Uniform points with both endpoints hit exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|k| {
                if k == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed spread between the three `g1` routes in a scan row.
    pub route: f64,
    /// Doubling-convergence tolerance handed to the Fock oracle.
    pub truncation: f64,
    /// Allowed `|V_balanced - g1|` in a fringe scan.
    pub visibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            route: 1e-12,
            truncation: 1e-8,
            visibility: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FringeConfig {
    pub nbar1: f64,
    pub t: f64,
    pub phases: usize,
    /// Write the balanced intensities instead of the raw ones.
    pub balance: bool,
}

impl Default for FringeConfig {
    fn default() -> Self {
        FringeConfig {
            nbar1: 1.0,
            t: 0.5,
            phases: 64,
            balance: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub t_grid: TGrid,
    pub nbar1: Vec<f64>,
    /// CSV output; stdout when absent.
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Also cross-check against the Fock oracle after a scan.
    pub verify: bool,
    pub tolerances: Tolerances,
    pub fringe: FringeConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            t_grid: TGrid::default(),
            nbar1: DEFAULT_NBAR1.to_vec(),
            out: None,
            svg: None,
            verify: false,
            tolerances: Tolerances::default(),
            fringe: FringeConfig::default(),
        }
    }
}

impl ScanConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = &self.t_grid;
        if grid.count < 2 {
            return Err(CliError::config("t_grid.count", format!("needs at least 2 points, got {}", grid.count)));
        }
        for (field, value) in [("t_grid.start", grid.start), ("t_grid.stop", grid.stop)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(CliError::config(field, format!("{value} is outside [0, 1]")));
            }
        }
        if grid.start >= grid.stop {
            return Err(CliError::config(
                "t_grid",
                format!("start {} must be below stop {}", grid.start, grid.stop),
            ));
        }
        if self.nbar1.is_empty() {
            return Err(CliError::config("nbar1", "needs at least one value"));
        }
        for (k, &n) in self.nbar1.iter().enumerate() {
            if !(n.is_finite() && n >= 0.0) {
                return Err(CliError::config(format!("nbar1[{k}]"), format!("{n} must be finite and non-negative")));
            }
        }
        let tol = &self.tolerances;
        for (field, value) in [
            ("tolerances.route", tol.route),
            ("tolerances.truncation", tol.truncation),
            ("tolerances.visibility", tol.visibility),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::config(field, format!("{value} must be positive")));
            }
        }
        let fringe = &self.fringe;
        if !(fringe.nbar1.is_finite() && fringe.nbar1 >= 0.0) {
            return Err(CliError::config("fringe.nbar1", format!("{} must be finite and non-negative", fringe.nbar1)));
        }
        if !(0.0..=1.0).contains(&fringe.t) {
            return Err(CliError::config("fringe.t", format!("{} is outside [0, 1]", fringe.t)));
        }
        if fringe.phases < 3 {
            return Err(CliError::config("fringe.phases", format!("needs at least 3 phases, got {}", fringe.phases)));
        }
        Ok(())
    }
}

/// Flag values that replace the corresponding config-file fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub t_steps: Option<usize>,
    pub nbar1: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub verify: bool,
    /// `(nbar1, t)` of the fringe point.
    pub fringe: Option<(f64, f64)>,
    pub phases: Option<usize>,
    pub balance: bool,
}

impl Overrides {
    pub fn apply(self, config: &mut ScanConfig) {
        if let Some(count) = self.t_steps {
            config.t_grid.count = count;
        }
        if let Some(nbar1) = self.nbar1 {
            config.nbar1 = nbar1;
        }
        if self.out.is_some() {
            config.out = self.out;
        }
        if self.svg.is_some() {
            config.svg = self.svg;
        }
        config.verify |= self.verify;
        if let Some((nbar1, t)) = self.fringe {
            config.fringe.nbar1 = nbar1;
            config.fringe.t = t;
        }
        if let Some(phases) = self.phases {
            config.fringe.phases = phases;
        }
        config.fringe.balance |= self.balance;
    }
}
