//! Self-contained SVG plots of diagram boundaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::partition::StepFunction;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 44.0;
const REFERENCE_POINTS: usize = 512;

/// Renders `step` (and optionally a reference curve) over
/// `[0, max(support, 6)] × [0, max(1.1, peak)]`.
pub fn svg_plot(
    step: &StepFunction,
    reference: Option<&dyn Fn(f64) -> f64>,
    title: &str,
) -> String {
    let x_max = step.support_end().max(6.0);
    let y_max = step.peak().max(1.1);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - y / y_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#,
        x0 = sx(0.0),
        y0 = sy(0.0),
        x1 = sx(x_max),
        y1 = sy(y_max),
    );
    let mut ticks = String::new();
    for t in nice_ticks(x_max) {
        let _ = write!(
            ticks,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{y2:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" text-anchor="middle">{label}</text>"#,
            x = sx(t),
            y = sy(0.0),
            y2 = sy(0.0) + 5.0,
            ty = sy(0.0) + 18.0,
            label = tick_label(t),
        );
    }
    for t in nice_ticks(y_max) {
        let _ = write!(
            ticks,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{label}</text>"#,
            x = sx(0.0),
            x2 = sx(0.0) - 5.0,
            y = sy(t),
            tx = sx(0.0) - 8.0,
            ty = sy(t) + 4.0,
            label = tick_label(t),
        );
    }
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="11">{ticks}</g>"#
    );

    if let Some(g) = reference {
        let points: Vec<String> = (0..REFERENCE_POINTS)
            .map(|i| {
                let x = x_max * i as f64 / (REFERENCE_POINTS - 1) as f64;
                format!("{:.2},{:.2}", sx(x), sy(g(x).clamp(0.0, y_max)))
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{}"/>"##,
            points.join(" ")
        );
    }

    let mut pts = Vec::with_capacity(2 * step.values().len() + 2);
    for (l, r, v) in step.segments() {
        pts.push((l, v));
        pts.push((r, v));
    }
    pts.push((step.support_end(), 0.0));
    pts.push((x_max, 0.0));
    let points: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg_plot(
    path: &Path,
    step: &StepFunction,
    reference: Option<&dyn Fn(f64) -> f64>,
    title: &str,
) -> Result<()> {
    fs::write(path, svg_plot(step, reference, title))?;
    Ok(())
}

fn nice_ticks(max: f64) -> Vec<f64> {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let count = (max / step).floor() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

fn tick_label(t: f64) -> String {
    let s = format!("{t:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
