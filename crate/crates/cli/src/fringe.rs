use wzm_core::experiment::{fringe_scan, uniform_phase_grid, ExperimentConfig, FringeScanResult};
use wzm_core::Error;

use crate::config::ScanConfig;
use crate::error::{CliError, Result};
use crate::format::{num, write_file};

pub const FRINGE_HEADER: &str = "phi,I_plus,I_minus";

#[derive(Clone, Debug)]
pub struct FringeOutcome {
    pub raw: FringeScanResult,
    pub balanced: FringeScanResult,
    pub csv: String,
}

impl FringeOutcome {
    pub fn g1(&self) -> f64 {
        self.balanced.g1
    }

    pub fn balance_error(&self) -> f64 {
        (self.balanced.visibility - self.balanced.g1).abs()
    }
}

pub fn render_csv(shown: &FringeScanResult, raw: &FringeScanResult, balanced: &FringeScanResult) -> String {
    let mut out = String::new();
    out.push_str(FRINGE_HEADER);
    out.push('\n');
    for ((phi, plus), minus) in shown.phases.iter().zip(&shown.i_plus).zip(&shown.i_minus) {
        out.push_str(&format!("{},{},{}\n", num(*phi), num(*plus), num(*minus)));
    }
    out.push_str(&format!(
        "# V_raw={},V_balanced={},g1={}\n",
        num(raw.visibility),
        num(balanced.visibility),
        num(balanced.g1)
    ));
    out
}

/// Scans the fringe phase at the configured point, writing the raw (or, with
/// `fringe.balance`, balanced) intensities plus a visibility summary line.
pub fn run_fringe(config: &ScanConfig) -> Result<FringeOutcome> {
    config.validate()?;
    let point = &config.fringe;
    let experiment = ExperimentConfig::from_nbar(point.nbar1, point.t)?;
    let phases = uniform_phase_grid(point.phases);
    let scan = |balance| {
        fringe_scan(&experiment, &phases, balance).map_err(|e| match e {
            Error::UndefinedCoherence(msg) => CliError::config("fringe.nbar1", format!("undefined coherence: {msg}")),
            other => other.into(),
        })
    };
    let raw = scan(false)?;
    let balanced = scan(true)?;
    let csv = render_csv(if point.balance { &balanced } else { &raw }, &raw, &balanced);
    if let Some(path) = &config.out {
        write_file(path, &csv)?;
    }
    Ok(FringeOutcome { raw, balanced, csv })
}
