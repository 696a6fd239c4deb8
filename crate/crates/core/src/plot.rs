//! Scatter export for three-dimensional bootstrap clouds: a CSV of the
//! points and a static SVG with the three coordinate-plane projections.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const PANEL: f64 = 280.0;
const MARGIN: f64 = 40.0;

fn scaled_label(scale: f64, i: usize) -> String {
    let sub = ['₁', '₂', '₃'][i];
    if (scale - 1.0).abs() < 1e-12 {
        format!("G{sub}")
    } else {
        format!("{scale}G{sub}")
    }
}

pub fn scatter_csv(points: &[[f64; 3]]) -> String {
    let mut s = String::from("g1,g2,g3\n");
    for p in points {
        let _ = writeln!(s, "{},{},{}", p[0], p[1], p[2]);
    }
    s
}

/// SVG 1.1 with panels (1,2), (1,3), (2,3). Axes share one symmetric range
/// so the panels are directly comparable. `scale` only affects the labels.
pub fn scatter_svg(points: &[[f64; 3]], scale: f64) -> String {
    let extent = points.iter().flatten().fold(0.0_f64, |a, x| a.max(x.abs()));
    let extent = if extent > 0.0 { extent * 1.1 } else { 1.0 };
    let width = 3.0 * PANEL + 4.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    for (panel, (a, b)) in [(0usize, 1usize), (0, 2), (1, 2)].into_iter().enumerate() {
        let x0 = MARGIN + panel as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        let map = |v: f64| (v / extent + 1.0) * PANEL / 2.0;
        let (cx, cy) = (x0 + PANEL / 2.0, y0 + PANEL / 2.0);
        let _ = writeln!(s, r#"<g id="panel{}">"#, panel + 1);
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{cy}" x2="{}" y2="{cy}" stroke="#999" stroke-dasharray="3,3"/>"##, x0 + PANEL);
        let _ = writeln!(s, r##"<line x1="{cx}" y1="{y0}" x2="{cx}" y2="{}" stroke="#999" stroke-dasharray="3,3"/>"##, y0 + PANEL);
        let _ = writeln!(s, r#"<text x="{cx}" y="{}" text-anchor="middle">{}</text>"#, y0 + PANEL + 28.0, scaled_label(scale, a));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{cy}" text-anchor="middle" transform="rotate(-90 {} {cy})">{}</text>"#,
            x0 - 24.0,
            x0 - 24.0,
            scaled_label(scale, b)
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">±{extent:.3}</text>"#, x0 + PANEL - 4.0, y0 + 12.0);
        for p in points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5"/>"#, x0 + map(p[a]), y0 + PANEL - map(p[b]));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<stem>.csv` and `<stem>.svg` and returns their paths.
pub fn emit_scatter(points: &[[f64; 3]], stem: &Path, scale: f64) -> Result<(PathBuf, PathBuf)> {
    if points.is_empty() {
        return Err(Error::Argument("scatter needs at least one point".into()));
    }
    let csv_path = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    std::fs::write(&csv_path, scatter_csv(points)).map_err(|e| io(&csv_path, e))?;
    std::fs::write(&svg_path, scatter_svg(points, scale)).map_err(|e| io(&svg_path, e))?;
    Ok((csv_path, svg_path))
}
