//! Rendering of result tables as CSV, JSON or SVG.

use std::fmt::Write as _;

use coord_risk::rational::{to_decimal, to_f64, to_fraction};
use coord_risk::Rational;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// How exact values are printed.
#[derive(Debug, Clone, Copy)]
pub struct NumberStyle {
    pub decimal: bool,
}

impl NumberStyle {
    pub fn show(&self, q: &Rational) -> String {
        if self.decimal {
            to_decimal(q, 17)
        } else {
            to_fraction(q)
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Exact(Rational),
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<Rational> for Cell {
    fn from(q: Rational) -> Self {
        Cell::Exact(q)
    }
}

impl From<&Rational> for Cell {
    fn from(q: &Rational) -> Self {
        Cell::Exact(q.clone())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn text(&self, style: NumberStyle) -> String {
        match self {
            Cell::Exact(q) => style.show(q),
            // Shortest round-trip form keeps reruns byte-identical.
            Cell::Float(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, style: NumberStyle) -> Value {
        match self {
            Cell::Exact(q) => Value::String(style.show(q)),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Exact(q) => Some(to_f64(q)),
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

/// Rows with named columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn csv(&self, style: NumberStyle) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| csv_field(&c.text(style))).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_rows(&self, style: NumberStyle) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(|c| c.json(style))).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    /// Column values as floats, for plotting.
    pub fn series(&self, column: &str) -> Vec<Option<f64>> {
        let k = self.columns.iter().position(|c| c == column).expect("known column");
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One plotted curve.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// A line plot with the y axis fixed to `[0, 1]` and the x axis to `x_range`.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, x_range: (f64, f64), series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let (x0, x1) = x_range;
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| M + (x - x0) / span * (W - 2.0 * M);
    let py = |y: f64| H - M - y * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#, W / 2.0, escape(title));
    // Axes and ticks.
    let _ = writeln!(s, r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - M, W - M, H - M);
    let _ = writeln!(s, r#"<line x1="{M}" y1="{M}" x2="{M}" y2="{}" stroke="black"/>"#, H - M);
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * span, t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{}" x2="{:.2}" y2="{}" stroke="black"/>"#, px(xv), H - M, px(xv), H - M + 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#, px(xv), H - M + 20.0, tick(xv));
        let _ = writeln!(s, r#"<line x1="{}" y1="{:.2}" x2="{M}" y2="{:.2}" stroke="black"/>"#, M - 5.0, py(yv), py(yv));
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{}</text>"#, M - 8.0, py(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#, W / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 18 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#, ser.color, pts.join(" "));
        let ly = M + 18.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#, W - M - 120.0, W - M - 100.0, ser.color);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#, W - M - 95.0, ly + 4.0, escape(ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let t = format!("{v:.2}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
