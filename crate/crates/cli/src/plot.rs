//! Dependency-free SVG plots of record tables: skill traces, histograms,
//! learning curves, and heatmaps. Output bytes are a pure function of the
//! parsed records, so identical inputs give identical files.

use diayn_core::metrics::Table;
use diayn_core::{Error, Result};
use std::fmt::Write as _;
use std::path::PathBuf;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 48.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Trace,
    Histogram,
    Curve,
    Heatmap,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<PlotKind> {
        match s {
            "trace" => Ok(PlotKind::Trace),
            "histogram" => Ok(PlotKind::Histogram),
            "curve" => Ok(PlotKind::Curve),
            "heatmap" => Ok(PlotKind::Heatmap),
            other => Err(Error::config(format!(
                "unknown plot kind {other:?} (expected trace, histogram, curve, or heatmap)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub input: PathBuf,
    pub x_label: String,
    pub y_label: String,
    pub output: PathBuf,
    /// Column selection for histogram plots; defaults to the last column.
    pub column: Option<String>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn of(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Frame {
        let mut f = Frame { x_min: f64::INFINITY, x_max: f64::NEG_INFINITY, y_min: f64::INFINITY, y_max: f64::NEG_INFINITY };
        for x in xs {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
        }
        for y in ys {
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if f.x_min == f.x_max {
            f.x_min -= 0.5;
            f.x_max += 0.5;
        }
        if f.y_min == f.y_max {
            f.y_min -= 0.5;
            f.y_max += 0.5;
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn svg_header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    // Min/max ticks.
    let _ = writeln!(
        out,
        r#"<text x="{x0:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
        y0 + 14.0,
        num(frame.x_min)
    );
    let _ = writeln!(
        out,
        r#"<text x="{x1:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
        y0 + 14.0,
        num(frame.x_max)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{y0:.2}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        num(frame.y_min)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        y1 + 4.0,
        num(frame.y_max)
    );
}

fn num(x: f64) -> String {
    format!("{x:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, frame: &Frame, points: &[(f64, f64)], color: &str) {
    let mut attr = String::new();
    for (x, y) in points {
        let _ = write!(attr, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
    }
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
        attr.trim_end()
    );
}

fn render_curve(table: &Table, x_label: &str, y_label: &str) -> Result<String> {
    if table.columns.len() < 2 {
        return Err(Error::input("curve plots need an x column and at least one series"));
    }
    let xs = table.rows.iter().map(|r| r[0]);
    let ys = table.rows.iter().flat_map(|r| r[1..].iter().copied());
    let frame = Frame::of(xs, ys);
    let mut out = String::new();
    svg_header(&mut out);
    axes(&mut out, &frame, x_label, y_label);
    for (series, name) in table.columns.iter().enumerate().skip(1) {
        let color = PALETTE[(series - 1) % PALETTE.len()];
        let points: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[0], r[series])).collect();
        polyline(&mut out, &frame, &points, color);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN_R - 120.0,
            MARGIN_T + 14.0 * series as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_trace(table: &Table, x_label: &str, y_label: &str) -> Result<String> {
    let skills = table.column("skill")?;
    let steps = table.column("step")?;
    let value_col = table
        .columns
        .iter()
        .position(|c| c != "skill" && c != "step")
        .ok_or_else(|| Error::input("trace plots need a value column besides skill and step"))?;
    let values: Vec<f64> = table.rows.iter().map(|r| r[value_col]).collect();
    let frame = Frame::of(steps.iter().copied(), values.iter().copied());
    let mut out = String::new();
    svg_header(&mut out);
    axes(&mut out, &frame, x_label, y_label);

    let mut ids: Vec<i64> = skills.iter().map(|&z| z as i64).collect();
    ids.sort_unstable();
    ids.dedup();
    for (i, id) in ids.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points: Vec<(f64, f64, f64)> = skills
            .iter()
            .zip(steps.iter())
            .zip(values.iter())
            .filter(|((z, _), _)| **z as i64 == *id)
            .map(|((_, s), v)| (*s, *v, 0.0))
            .collect();
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let pts: Vec<(f64, f64)> = points.iter().map(|(s, v, _)| (*s, *v)).collect();
        polyline(&mut out, &frame, &pts, color);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_histogram(table: &Table, column: Option<&str>, x_label: &str, y_label: &str) -> Result<String> {
    let name = column
        .map(|c| c.to_string())
        .unwrap_or_else(|| table.columns.last().unwrap().clone());
    let values = table.column(&name)?;
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let bins = 20usize;
    let mut counts = vec![0usize; bins];
    for &v in &values {
        let b = (((v - lo) / (hi - lo)) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let max_count = *counts.iter().max().unwrap() as f64;
    let frame = Frame { x_min: lo, x_max: hi, y_min: 0.0, y_max: max_count };
    let mut out = String::new();
    svg_header(&mut out);
    axes(&mut out, &frame, x_label, y_label);
    let bin_w = (hi - lo) / bins as f64;
    for (b, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x = frame.px(lo + b as f64 * bin_w);
        let x2 = frame.px(lo + (b + 1) as f64 * bin_w);
        let y = frame.py(c as f64);
        let y0 = frame.py(0.0);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white" stroke-width="0.5"/>"#,
            x2 - x,
            y0 - y,
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_heatmap(table: &Table, x_label: &str, y_label: &str) -> Result<String> {
    let xs = table.column("x")?;
    let ys = table.column("y")?;
    let vs = table.column("value")?;
    let frame = Frame::of(xs.iter().copied(), ys.iter().copied());
    let v_lo = vs.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_hi = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if v_hi > v_lo { v_hi - v_lo } else { 1.0 };
    // Cell size from the smallest positive spacing in each axis.
    let spacing = |mut vals: Vec<f64>| -> f64 {
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        vals.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
            .min(1.0)
    };
    let dx = spacing(xs.clone());
    let dy = spacing(ys.clone());
    let mut out = String::new();
    svg_header(&mut out);
    axes(&mut out, &frame, x_label, y_label);
    for ((x, y), v) in xs.iter().zip(ys.iter()).zip(vs.iter()) {
        let t = (v - v_lo) / span;
        let r = (255.0 * (1.0 - t)) as u8;
        let g = (255.0 * (1.0 - 0.55 * t)) as u8;
        let x0 = frame.px(x - dx / 2.0);
        let x1 = frame.px(x + dx / 2.0);
        let y0 = frame.py(y + dy / 2.0);
        let y1 = frame.py(y - dy / 2.0);
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},255)"/>"#,
            x1 - x0,
            y1 - y0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render a plot spec to SVG text.
pub fn render_plot(spec: &PlotSpec) -> Result<String> {
    let table = Table::read(&spec.input)?;
    if table.rows.is_empty() {
        return Err(Error::input(format!(
            "record file {} has no data rows",
            spec.input.display()
        )));
    }
    match spec.kind {
        PlotKind::Curve => render_curve(&table, &spec.x_label, &spec.y_label),
        PlotKind::Trace => render_trace(&table, &spec.x_label, &spec.y_label),
        PlotKind::Histogram => {
            render_histogram(&table, spec.column.as_deref(), &spec.x_label, &spec.y_label)
        }
        PlotKind::Heatmap => render_heatmap(&table, &spec.x_label, &spec.y_label),
    }
}

/// Render and write the SVG file.
pub fn export_plot(spec: &PlotSpec) -> Result<()> {
    let svg = render_plot(spec)?;
    std::fs::write(&spec.output, svg)?;
    Ok(())
}
