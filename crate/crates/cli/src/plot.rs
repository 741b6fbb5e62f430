//! Revenue curves as self-contained SVG.
//!
//! Closed-form series are drawn as polylines and Monte Carlo series as
//! circle markers with ±1 stderr whiskers. Every series gets a legend entry.

use std::fmt::Write as _;
use std::path::Path;

use crate::sweep::{Estimator, SweepRow};
use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Series<'a> {
    name: String,
    estimator: Estimator,
    points: Vec<&'a SweepRow>,
}

fn group(rows: &[SweepRow]) -> Vec<Series<'_>> {
    let several_formats = rows.iter().any(|r| r.format != rows[0].format);
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let name = if several_formats {
            format!("{} ({})", r.contract, r.format)
        } else {
            r.contract.clone()
        };
        match out.iter_mut().find(|s| s.name == name && s.estimator == r.estimator) {
            Some(s) => s.points.push(r),
            None => out.push(Series {
                name,
                estimator: r.estimator,
                points: vec![r],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    }
    out
}

/// Axis range padded by 5% (or ±0.5 for a single value).
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Builds the SVG document for a set of sweep rows.
pub fn render_svg(rows: &[SweepRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(psclab::Error::EmptyInput.into());
    }
    let series = group(rows);
    let (a_lo, a_hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.alpha), h.max(r.alpha)));
    let (r_lo, r_hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| {
        (l.min(r.total - r.stderr), h.max(r.total + r.stderr))
    });
    let (x0, x1) = padded(a_lo, a_hi);
    let (y0, y1) = padded(r_lo, r_hi);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |a: f64| LEFT + (a - x0) / (x1 - x0) * plot_w;
    let py = |v: f64| TOP + (y1 - v) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let a = x0 + t * (x1 - x0);
        let v = y0 + t * (y1 - y0);
        let (xa, yv) = (px(a), py(v));
        let _ = writeln!(
            svg,
            r#"<line x1="{xa:.2}" y1="{:.2}" x2="{xa:.2}" y2="{:.2}" stroke="black"/><text x="{xa:.2}" y="{:.2}" text-anchor="middle">{a:.2}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 19.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{yv:.2}" x2="{LEFT}" y2="{yv:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.4}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            yv + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">share fraction α</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">expected seller revenue</text>"#,
        TOP + plot_h / 2.0
    );

    let mut colors: Vec<String> = Vec::new();
    for (k, s) in series.iter().enumerate() {
        let slot = match colors.iter().position(|n| *n == s.name) {
            Some(i) => i,
            None => {
                colors.push(s.name.clone());
                colors.len() - 1
            }
        };
        let color = PALETTE[slot % PALETTE.len()];
        let label = format!("{} [{}]", s.name, s.estimator.as_str());
        match s.estimator {
            Estimator::ClosedForm if s.points.len() > 1 => {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|r| format!("{:.2},{:.2}", px(r.alpha), py(r.total)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline class="closed_form" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            _ => {
                let _ = writeln!(svg, r#"<g class="{}" fill="{color}" stroke="{color}">"#, s.estimator.as_str());
                for r in &s.points {
                    let (x, y) = (px(r.alpha), py(r.total));
                    if r.stderr > 0.0 {
                        let _ = writeln!(
                            svg,
                            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
                            py(r.total + r.stderr),
                            py(r.total - r.stderr)
                        );
                    }
                    let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5"/>"#);
                }
                let _ = writeln!(svg, "</g>");
            }
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 14.0;
        match s.estimator {
            Estimator::ClosedForm => {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                    lx + 22.0
                );
            }
            Estimator::Mc => {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{ly:.2}" r="3.5" fill="{color}"/>"#, lx + 11.0);
            }
        }
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(&label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the SVG for `rows` to `path`.
pub fn emit_plot(rows: &[SweepRow], path: &Path) -> Result<(), CliError> {
    let svg = render_svg(rows)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}
