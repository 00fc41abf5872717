use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Destination for machine-readable output: a file, or stdout.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with a fixed header. Rows are flushed as they are written so a
/// failing run still leaves the completed rows behind.
pub struct CsvWriter {
    out: Box<dyn Write>,
    columns: usize,
}

impl CsvWriter {
    pub fn new(mut out: Box<dyn Write>, header: &[&str]) -> Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter { out, columns: header.len() })
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Num(x) => num(x),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => quote(&s),
            })
            .collect();
        writeln!(self.out, "{}", line.join(","))?;
        self.out.flush()?;
        Ok(())
    }

    /// `error,<message>` padded to the header width.
    pub fn error_trailer(&mut self, message: &str) -> Result<()> {
        let mut cells = vec![Cell::Text("error".into()), Cell::Text(message.replace('\n', " "))];
        while cells.len() < self.columns {
            cells.push(Cell::Text(String::new()));
        }
        cells.truncate(self.columns.max(2));
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Text(s) => quote(&s),
                _ => unreachable!(),
            })
            .collect();
        writeln!(self.out, "{}", line.join(","))?;
        self.out.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// First sign change of `y` along the series, by linear interpolation.
pub fn zero_crossing(points: &[(f64, f64)]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == 0.0 {
            Some(x0)
        } else if (y0 > 0.0) != (y1 > 0.0) {
            Some(x0 + (x1 - x0) * y0 / (y0 - y1))
        } else {
            None
        }
    })
}

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Line plot of every series with the `y = 0` line and the zero crossing of
/// the last series marked.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, m) = (720.0, 480.0, 70.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    for t in ticks(x0, x1) {
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4}</text>"#,
            px(t),
            h - m,
            h - m + 5.0,
            h - m + 20.0,
            t
        );
    }
    for t in ticks(y0, y1) {
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/><text x="{3}" y="{4:.2}" text-anchor="end">{5}</text>"#,
            m - 5.0,
            py(t),
            m,
            m - 8.0,
            py(t) + 4.0,
            t
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, w / 2.0, h - 20.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{y_label}</text>"#,
        h / 2.0
    );
    let _ = writeln!(
        s,
        r##"<line x1="{m}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        py(0.0),
        w - m
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        for &(x, y) in &ser.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            w - m + 6.0,
            m + 14.0 * (i as f64 + 1.0),
            ser.label
        );
    }
    if let Some(xc) = series.last().and_then(|ser| zero_crossing(&ser.points)) {
        let _ = writeln!(
            s,
            r#"<circle cx="{0:.2}" cy="{1:.2}" r="5" fill="none" stroke="red" stroke-width="2"/><text x="{0:.2}" y="{2:.2}" fill="red" text-anchor="middle">zero at {3:.5}</text>"#,
            px(xc),
            py(0.0),
            py(0.0) - 10.0,
            xc
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(2.179660000001), "2.17966000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(num(2.0).parse::<f64>().unwrap(), 2.0);
    }

    #[test]
    fn crossing_interpolates() {
        let pts = [(1.0, 2.0), (2.0, 1.0), (3.0, -1.0)];
        assert_eq!(zero_crossing(&pts), Some(2.5));
        assert_eq!(zero_crossing(&pts[..2]), None);
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("plain"), "plain");
    }

    #[test]
    fn plot_is_self_contained() {
        let svg = svg_plot("t", "a", "l", &[Series { label: "k=1".into(), points: vec![(1.0, 1.0), (2.0, -1.0)] }]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("zero at 1.50000"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
