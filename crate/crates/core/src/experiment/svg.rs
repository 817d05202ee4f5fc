//! Log-scale ASEP charts rendered as plain SVG 1.1 text.

use std::fmt::Write as _;
use std::path::Path;

use super::{parse_csv, CsvRow};
use crate::{Error, Result};

/// Size of one chart; several experiments in one CSV are stacked vertically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub width: u32,
    pub height: u32,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { width: 760, height: 460 }
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
];
const LEFT: f64 = 72.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;
const LEGEND: f64 = 230.0;

struct Series<'a> {
    label: String,
    colour_key: String,
    method: &'a str,
    points: Vec<&'a CsvRow>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn dash(method: &str) -> Option<&'static str> {
    match method {
        "mc" => None,
        "analytic-exact" => Some("7 4"),
        "analytic-lower" => Some("2 3"),
        _ => Some("9 3 2 3"),
    }
}

/// Render the chart for a result CSV.
pub fn render_svg(csv_text: &str, style: &SvgStyle) -> Result<String> {
    let rows = parse_csv(csv_text)?;
    if rows.is_empty() {
        return Err(Error::Csv("no data rows to plot".into()));
    }
    let mut experiments: Vec<&str> = Vec::new();
    for r in &rows {
        if !experiments.contains(&r.experiment.as_str()) {
            experiments.push(&r.experiment);
        }
    }
    let (w, h) = (style.width as f64, style.height as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        style.width,
        style.height as usize * experiments.len(),
        style.width,
        style.height as usize * experiments.len()
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, name) in experiments.iter().enumerate() {
        let chart: Vec<&CsvRow> = rows.iter().filter(|r| r.experiment == *name).collect();
        render_chart(&mut out, name, &chart, w, h, i as f64 * h)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_chart(out: &mut String, name: &str, rows: &[&CsvRow], w: f64, h: f64, y0: f64) -> Result<()> {
    let mut series: Vec<Series> = Vec::new();
    for r in rows {
        let label = r.series_label();
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(r),
            None => {
                let colour_key = label.trim_end_matches(r.method.as_str()).to_string();
                series.push(Series {
                    label,
                    colour_key,
                    method: &r.method,
                    points: vec![r],
                })
            }
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    }
    let mut colour_keys: Vec<&str> = Vec::new();
    for s in &series {
        if !colour_keys.contains(&s.colour_key.as_str()) {
            colour_keys.push(&s.colour_key);
        }
    }

    let xs = rows.iter().map(|r| r.snr_db);
    let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x_min, x_max) = if x_max > x_min { (x_min, x_max) } else { (x_min - 1.0, x_max + 1.0) };
    let positive = rows
        .iter()
        .flat_map(|r| [r.asep, r.ci_low, r.ci_high])
        .filter(|v| *v > 0.0 && v.is_finite());
    let (v_min, v_max) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !v_min.is_finite() {
        return Err(Error::Csv(format!("experiment {name} has no positive ASEP values")));
    }
    let d_lo = v_min.log10().floor() as i32;
    let mut d_hi = v_max.log10().ceil() as i32;
    if d_hi <= d_lo {
        d_hi = d_lo + 1;
    }

    let (px0, px1) = (LEFT, w - LEGEND);
    let (py0, py1) = (y0 + TOP, y0 + h - BOTTOM);
    let sx = |x: f64| px0 + (x - x_min) / (x_max - x_min) * (px1 - px0);
    let sy = |v: f64| {
        let lv = v.max(10f64.powi(d_lo)).log10();
        py1 - (lv - d_lo as f64) / (d_hi - d_lo) as f64 * (py1 - py0)
    };

    let _ = writeln!(out, r#"<g>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        (px0 + px1) / 2.0,
        y0 + 22.0,
        escape(name)
    );
    // Decade grid and y labels.
    for d in d_lo..=d_hi {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line x1="{px0:.2}" y1="{y:.2}" x2="{px1:.2}" y2="{y:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            px0 - 6.0,
            y + 4.0
        );
    }
    // x ticks on the distinct grid values, thinned to at most 11.
    let mut grid: Vec<f64> = rows.iter().map(|r| r.snr_db).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let stride = grid.len().div_ceil(11).max(1);
    for x in grid.iter().step_by(stride) {
        let px = sx(*x);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{py1:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000000"/>"##,
            py1 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            py1 + 18.0
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
        px1 - px0,
        py1 - py0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">SNR (dB)</text>"#,
        (px0 + px1) / 2.0,
        py1 + 40.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">ASEP</text>"#,
        18.0,
        (py0 + py1) / 2.0,
        18.0,
        (py0 + py1) / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let ci = colour_keys.iter().position(|c| *c == s.colour_key).unwrap_or(0);
        let colour = PALETTE[ci % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.snr_db), sy(r.asep)))
            .collect();
        let dash_attr = dash(s.method).map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.6"{dash_attr}/>"#,
            pts.join(" ")
        );
        if s.method == "mc" {
            for r in &s.points {
                let (px, top, bot) = (sx(r.snr_db), sy(r.ci_high), sy(r.ci_low));
                let _ = writeln!(
                    out,
                    r#"<path d="M{px:.2} {top:.2}V{bot:.2}M{:.2} {top:.2}H{:.2}M{:.2} {bot:.2}H{:.2}" stroke="{colour}"/>"#,
                    px - 3.0,
                    px + 3.0,
                    px - 3.0,
                    px + 3.0
                );
                let _ = writeln!(
                    out,
                    r#"<circle cx="{px:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#,
                    sy(r.asep)
                );
            }
        }
        let ly = py0 + 8.0 + 18.0 * k as f64;
        let lx = px1 + 14.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="1.6"{dash_attr}/>"#,
            lx + 26.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    let _ = writeln!(out, "</g>");
    Ok(())
}

/// Read a result CSV and write its chart.
pub fn emit_svg(csv_path: &Path, svg_path: &Path, style: &SvgStyle) -> Result<()> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let svg = render_svg(&text, style)?;
    std::fs::write(svg_path, svg).map_err(|e| Error::io(svg_path, e))
}
