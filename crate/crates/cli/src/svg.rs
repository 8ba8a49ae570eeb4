//! Static SVG 1.1 line chart of `g1` against `t`, one polyline per `nbar1`.

use std::fmt::Write;

use crate::scan::ScanRow;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn x_of(t: f64) -> f64 {
    LEFT + t * (WIDTH - LEFT - RIGHT)
}

fn y_of(g: f64) -> f64 {
    TOP + (1.0 - g) * (HEIGHT - TOP - BOTTOM)
}

/// Consecutive runs of rows sharing `nbar1`, in order of appearance.
pub fn curves(rows: &[ScanRow]) -> Vec<(f64, Vec<(f64, f64)>)> {
    let mut out: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some((n, points)) if *n == row.nbar1 => points.push((row.t, row.g1)),
            _ => out.push((row.nbar1, vec![(row.t, row.g1)])),
        }
    }
    out
}

pub fn render_curves(rows: &[ScanRow]) -> String {
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // grid and ticks
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let (x, y) = (x_of(v), y_of(v));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            y_of(0.0),
            y_of(1.0)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            x_of(0.0),
            x_of(1.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{v:.1}</text>"#,
            y_of(0.0) + 22.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="end">{v:.1}</text>"#,
            x_of(0.0) - 8.0,
            y + 5.0
        );
    }

    // axes
    let _ = writeln!(
        svg,
        r#"<polyline points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        x_of(0.0),
        y_of(1.0),
        x_of(0.0),
        y_of(0.0),
        x_of(1.0),
        y_of(0.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="16" text-anchor="middle">transmission amplitude t</text>"#,
        x_of(0.5),
        HEIGHT - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="22" y="{:.2}" font-family="sans-serif" font-size="16" text-anchor="middle" transform="rotate(-90 22 {:.2})">g(1)(1,2)</text>"#,
        y_of(0.5),
        y_of(0.5)
    );

    for (k, (nbar1, points)) in curves(rows).iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(t, g)| format!("{:.2},{:.2}", x_of(t), y_of(g)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 20.0 + 24.0 * k as f64;
        let lx = WIDTH - RIGHT + 20.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 30.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">nbar1 = {nbar1}</text>"#,
            lx + 38.0,
            ly + 5.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
