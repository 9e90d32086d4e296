//! File formats: driver CSV (`t,lambda`), curve JSON and SVG figures.

use std::fmt::Write as _;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polyline;
use crate::loewner::DrivingFunction;

fn parse_error(context: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { context: context.into(), line, message: message.into() }
}

/// Writes `t,lambda` rows with shortest round-trip decimals.
pub fn write_driver_csv(lambda: &DrivingFunction, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "lambda"]).map_err(io)?;
    for (t, v) in lambda.times().iter().zip(lambda.values()) {
        w.write_record([t.to_string(), v.to_string()]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_driver_csv(input: impl Read) -> Result<DrivingFunction> {
    const CTX: &str = "driver csv";
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(|e| parse_error(CTX, 1, e.to_string()))?.clone();
    if header.len() != 2 || &header[0] != "t" || &header[1] != "lambda" {
        return Err(parse_error(CTX, 1, format!("expected header `t,lambda`, got `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (k, row) in r.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| parse_error(CTX, line, e.to_string()))?;
        let field = |i: usize, name: &str| -> Result<f64> {
            row.get(i)
                .ok_or_else(|| parse_error(CTX, line, format!("missing field `{name}`")))?
                .parse::<f64>()
                .map_err(|e| parse_error(CTX, line, format!("field `{name}`: {e}")))
        };
        times.push(field(0, "t")?);
        values.push(field(1, "lambda")?);
    }
    DrivingFunction::new(times, values).map_err(|e| parse_error(CTX, 0, e.to_string()))
}

/// On-disk curve: `{"vertices": [[x, y], ...], "times": [...]}` with optional times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub vertices: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

impl CurveFile {
    pub fn from_polyline(curve: &Polyline, times: Option<Vec<f64>>) -> Self {
        Self { vertices: curve.vertices.iter().map(|z| [z.re, z.im]).collect(), times }
    }

    pub fn polyline(&self) -> Polyline {
        Polyline::new(self.vertices.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

pub fn write_curve_json(curve: &CurveFile, out: impl Write) -> Result<()> {
    serde_json::to_writer(out, curve).map_err(|e| Error::Io(e.to_string()))
}

pub fn read_curve_json(input: impl Read) -> Result<CurveFile> {
    let curve: CurveFile =
        serde_json::from_reader(input).map_err(|e| parse_error("curve json", e.line(), e.to_string()))?;
    if let Some(times) = &curve.times {
        if times.len() != curve.vertices.len() {
            return Err(parse_error("curve json", 0, "times and vertices differ in length"));
        }
    }
    if let Some(k) = curve.vertices.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(parse_error("curve json", 0, format!("vertex {k} is not finite")));
    }
    Ok(curve)
}

/// Reads real numbers separated by commas, whitespace or newlines; `#` starts a comment.
pub fn read_numbers(input: impl Read, context: &str) -> Result<Vec<f64>> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            out.push(tok.parse().map_err(|e| parse_error(context, line_no, format!("`{tok}`: {e}")))?);
        }
    }
    Ok(out)
}

/// Static SVG with one `<path>` per curve and the two coordinate axes.
pub fn render_svg(curves: &[&Polyline], width: u32, height: u32) -> String {
    let pts = curves.iter().flat_map(|c| c.vertices.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (-1.0f64, 1.0f64, 0.0f64, 1.0f64);
    for z in pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let scale = (width as f64 / (x1 - x0)).min(height as f64 / (y1 - y0));
    let px = |x: f64| (x - x0) * scale;
    let py = |y: f64| (y1 - y) * scale;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#);
    let _ = writeln!(s, r##"<g class="axes" stroke="#888" stroke-width="1">"##);
    let _ = writeln!(s, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#, px(x0), py(0.0), px(x1), py(0.0));
    let _ = writeln!(s, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#, px(0.0), py(y0), px(0.0), py(y1));
    let _ = writeln!(s, "</g>");
    const COLORS: [&str; 4] = ["#1f4e9c", "#b8461b", "#2a7a3a", "#6b2a8c"];
    for (k, c) in curves.iter().enumerate() {
        let mut d = String::new();
        for (j, z) in c.vertices.iter().enumerate() {
            let _ = write!(d, "{}{:.3},{:.3}", if j == 0 { "M" } else { " L" }, px(z.re), py(z.im));
        }
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1"/>"#, COLORS[k % COLORS.len()]);
    }
    s.push_str("</svg>\n");
    s
}
