//! Cross-validation of the exact backend against the Fock-space oracle.

use rayon::prelude::*;
use wzm_core::experiment::{build_chain, ExperimentConfig};
use wzm_core::fock::{truncation_check, ORACLE_MAX_CHI};
use wzm_core::{Error, MomentSet};

use crate::config::ScanConfig;
use crate::error::Result;
use crate::format::{num, write_file};

pub const VERIFY_HEADER: &str = "nbar1,t,status,cutoff,error_estimate,max_deviation,\
n_s1_exact,n_s2_exact,cross_re_exact,cross_im_exact,\
n_s1_oracle,n_s2_oracle,cross_re_oracle,cross_im_oracle";

/// Agreement floor, below which truncation estimates are not trusted.
pub const DEVIATION_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyStatus {
    Pass,
    Fail,
    /// `nbar1` needs `chi > ORACLE_MAX_CHI`.
    Skipped,
    /// Truncation did not converge below the cutoff cap.
    Unconverged(String),
}

impl VerifyStatus {
    pub fn label(&self) -> &'static str {
        match self {
            VerifyStatus::Pass => "PASS",
            VerifyStatus::Fail => "FAIL",
            VerifyStatus::Skipped => "SKIPPED",
            VerifyStatus::Unconverged(_) => "UNCONVERGED",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyPoint {
    pub nbar1: f64,
    pub t: f64,
    pub status: VerifyStatus,
    pub exact: Option<MomentSet>,
    pub oracle: Option<MomentSet>,
    pub cutoff: Option<usize>,
    pub error_estimate: Option<f64>,
    pub max_deviation: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub points: Vec<VerifyPoint>,
    pub csv: String,
}

impl VerifyReport {
    pub fn verified(&self) -> usize {
        self.points.iter().filter(|p| p.status != VerifyStatus::Skipped).count()
    }

    /// Points that failed the deviation bound or did not converge.
    pub fn failures(&self) -> Vec<&VerifyPoint> {
        self.points
            .iter()
            .filter(|p| matches!(p.status, VerifyStatus::Fail | VerifyStatus::Unconverged(_)))
            .collect()
    }

    pub fn skipped_nbar1(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in self.points.iter().filter(|p| p.status == VerifyStatus::Skipped) {
            if !out.contains(&p.nbar1) {
                out.push(p.nbar1);
            }
        }
        out
    }
}

pub fn oracle_feasible(nbar1: f64) -> bool {
    nbar1 <= ORACLE_MAX_CHI.sinh().powi(2)
}

pub fn verify_point(nbar1: f64, t: f64, truncation_tol: f64) -> Result<VerifyPoint> {
    let mut point = VerifyPoint {
        nbar1,
        t,
        status: VerifyStatus::Skipped,
        exact: None,
        oracle: None,
        cutoff: None,
        error_estimate: None,
        max_deviation: None,
    };
    if !oracle_feasible(nbar1) {
        return Ok(point);
    }
    let config = ExperimentConfig::from_nbar(nbar1, t)?;
    let exact = build_chain(&config)?.vacuum_moments();
    match truncation_check(&config, truncation_tol) {
        Ok(report) => {
            let deviation = report.moments.max_deviation(&exact);
            let allowed = DEVIATION_FLOOR.max(report.error_estimate);
            point.status = if deviation <= allowed {
                VerifyStatus::Pass
            } else {
                VerifyStatus::Fail
            };
            point.cutoff = Some(report.cutoff);
            point.error_estimate = Some(report.error_estimate);
            point.max_deviation = Some(deviation);
            point.oracle = Some(report.moments);
        }
        Err(e @ Error::ConvergenceFailure { .. }) => point.status = VerifyStatus::Unconverged(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    point.exact = Some(exact);
    Ok(point)
}

fn moment_fields(m: Option<&MomentSet>) -> String {
    match m {
        Some(m) => format!("{},{},{},{}", num(m.n_s1), num(m.n_s2), num(m.cross.re), num(m.cross.im)),
        None => ",,,".to_string(),
    }
}

pub fn render_csv(points: &[VerifyPoint]) -> String {
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let mut out = String::new();
    out.push_str(VERIFY_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            num(p.nbar1),
            num(p.t),
            p.status.label(),
            p.cutoff.map(|n| n.to_string()).unwrap_or_default(),
            opt(p.error_estimate),
            opt(p.max_deviation),
            moment_fields(p.exact.as_ref()),
            moment_fields(p.oracle.as_ref()),
        ));
    }
    out
}

pub fn run_verify(config: &ScanConfig) -> Result<VerifyReport> {
    config.validate()?;
    let t_points = config.t_grid.points();
    let tol = config.tolerances.truncation;
    let grid: Vec<(f64, f64)> = config
        .nbar1
        .iter()
        .flat_map(|&n| t_points.iter().map(move |&t| (n, t)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(n, t)| verify_point(n, t, tol))
        .collect::<Result<Vec<_>>>()?;
    let csv = render_csv(&points);
    Ok(VerifyReport { points, csv })
}

/// Writes the report to `config.out` if set.
pub fn write_report(config: &ScanConfig, report: &VerifyReport) -> Result<()> {
    if let Some(path) = &config.out {
        write_file(path, &report.csv)?;
    }
    Ok(())
}
