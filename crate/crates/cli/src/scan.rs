use rayon::prelude::*;
use wzm_core::experiment::{build_chain, g1_closed_form, g1_from_moments, g1_nbar_form, ExperimentConfig};

use crate::config::ScanConfig;
use crate::error::Result;
use crate::format::{num, write_file};
use crate::svg;

pub const SCAN_HEADER: &str = "nbar1,t,g1,g1_route_moments,g1_route_closed,delta";

/// One `(nbar1, t)` grid point evaluated by all three routes.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub nbar1: f64,
    pub t: f64,
    /// Photon-number form.
    pub g1: f64,
    /// Ratio of the exact backend's vacuum moments; `None` at `nbar1 = 0`,
    /// where the ratio is 0/0.
    pub g1_route_moments: Option<f64>,
    /// Closed form in `chi`.
    pub g1_route_closed: f64,
    /// Largest pairwise difference between the defined routes.
    pub delta: f64,
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    pub csv: String,
    pub svg: Option<String>,
    /// Rows whose `delta` reached the route tolerance.
    pub flagged: Vec<ScanRow>,
    /// Rows where the moment ratio is undefined.
    pub undefined: Vec<ScanRow>,
}

pub fn evaluate_point(nbar1: f64, t: f64) -> Result<ScanRow> {
    let config = ExperimentConfig::from_nbar(nbar1, t)?;
    let g1 = g1_nbar_form(nbar1, t);
    let g1_route_closed = g1_closed_form(config.chi(), t);
    let g1_route_moments = g1_from_moments(&build_chain(&config)?.vacuum_moments()).ok();
    let mut delta = (g1 - g1_route_closed).abs();
    if let Some(m) = g1_route_moments {
        delta = delta.max((g1 - m).abs()).max((g1_route_closed - m).abs());
    }
    Ok(ScanRow {
        nbar1,
        t,
        g1,
        g1_route_moments,
        g1_route_closed,
        delta,
    })
}

/// Evaluates the grid in parallel; rows come back in `nbar1`-major grid order.
pub fn compute_rows(config: &ScanConfig) -> Result<Vec<ScanRow>> {
    let t_points = config.t_grid.points();
    let points: Vec<(f64, f64)> = config
        .nbar1
        .iter()
        .flat_map(|&n| t_points.iter().map(move |&t| (n, t)))
        .collect();
    points.into_par_iter().map(|(n, t)| evaluate_point(n, t)).collect()
}

pub fn render_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 128);
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for row in rows {
        let moments = row.g1_route_moments.map_or_else(|| "NaN".to_string(), num);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(row.nbar1),
            num(row.t),
            num(row.g1),
            moments,
            num(row.g1_route_closed),
            num(row.delta)
        ));
    }
    out
}

/// Runs the sweep and writes the CSV (and SVG, if configured).
pub fn run_scan(config: &ScanConfig) -> Result<ScanOutcome> {
    config.validate()?;
    let rows = compute_rows(config)?;
    let csv = render_csv(&rows);
    let svg = config.svg.as_ref().map(|_| svg::render_curves(&rows));

    if let Some(path) = &config.out {
        write_file(path, &csv)?;
    }
    if let (Some(path), Some(body)) = (&config.svg, &svg) {
        write_file(path, body)?;
    }

    let flagged = rows
        .iter()
        .filter(|r| !(r.delta < config.tolerances.route))
        .cloned()
        .collect();
    let undefined = rows.iter().filter(|r| r.g1_route_moments.is_none()).cloned().collect();
    Ok(ScanOutcome {
        rows,
        csv,
        svg,
        flagged,
        undefined,
    })
}
