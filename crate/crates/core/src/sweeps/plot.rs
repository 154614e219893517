//! Minimal static SVG emission: one log-log plot per functional with the
//! fitted power law overlaid. No interactive display, files only.

use super::{RateFit, SweepResult};
use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Write a log-log scatter of functional values against 1/ħ, with the
/// fitted line when a fit is available.
pub fn plot_functional(
    result: &SweepResult,
    functional_index: usize,
    fit: Option<&RateFit>,
    path: &Path,
) -> Result<()> {
    let points: Vec<(f64, f64)> = result
        .records
        .iter()
        .filter_map(|r| {
            let v = r.values.get(functional_index).copied().flatten()?;
            (v > 0.0).then(|| ((1.0 / r.hbar).ln(), v.ln()))
        })
        .collect();

    let label = result
        .functional_labels
        .get(functional_index)
        .cloned()
        .unwrap_or_else(|| format!("functional {functional_index}"));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if points.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">no positive data for {label}</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        let _ = writeln!(svg, "</svg>");
        std::fs::write(path, svg)?;
        return Ok(());
    }

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if x_hi - x_lo < 1e-9 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-9 {
        y_hi = y_lo + 1.0;
    }
    let pad_x = 0.05 * (x_hi - x_lo);
    let pad_y = 0.1 * (y_hi - y_lo);
    x_lo -= pad_x;
    x_hi += pad_x;
    y_lo -= pad_y;
    y_hi += pad_y;

    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN,
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN,
        MARGIN,
        MARGIN,
        HEIGHT - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">log(1/hbar)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">log {label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    // fitted line under the points
    if let Some(fit) = fit {
        let y_at = |x: f64| fit.prefactor.ln() + fit.exponent * x + if x > 0.0 {
            fit.log_power * x.ln()
        } else {
            0.0
        };
        let x0 = x_lo + pad_x;
        let x1 = x_hi - pad_x;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="1.5"/>"#,
            sx(x0),
            sy(y_at(x0)),
            sx(x1),
            sy(y_at(x1))
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="13" fill="crimson">p = {:.4}, q = {:.4}, R2 = {:.5}</text>"#,
            MARGIN + 10.0,
            MARGIN - 10.0,
            fit.exponent,
            fit.log_power,
            fit.r_squared
        );
    }

    for &(x, y) in &points {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#,
            sx(x),
            sy(y)
        );
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg)?;
    Ok(())
}
