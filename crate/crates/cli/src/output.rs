//! CSV, JSON and SVG rendering.

use std::fmt::Write as _;

use serde::Serialize;

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// A CSV table with a fixed header.
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut t = Self {
            text: String::new(),
            columns: header.len(),
        };
        t.push(header.iter().map(|h| h.as_ref().to_string()).collect());
        t
    }

    pub fn push(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Log-log plot of `(N, error)` with a slope −2 reference line through the
/// first point.
pub struct LogLogPlot<'a> {
    pub title: &'a str,
    pub points: &'a [(f64, f64)],
    pub slope: Option<f64>,
    pub log_exponent: u32,
}

impl LogLogPlot<'_> {
    pub fn render(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const M: f64 = 60.0;
        let logs: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|(n, e)| *n > 0.0 && *e > 0.0)
            .map(|(n, e)| (n.log2(), e.log2()))
            .collect();
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{M}" y="30" font-family="sans-serif" font-size="14">{}</text>"#,
            escape(self.title)
        );
        if logs.is_empty() {
            svg.push_str("</svg>\n");
            return svg;
        }
        let (x0, y0) = logs[0];
        let reference: Vec<(f64, f64)> = logs.iter().map(|&(x, _)| (x, y0 - 2.0 * (x - x0))).collect();
        let all = logs.iter().chain(&reference);
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in all {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if xmax - xmin < 1e-9 {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if ymax - ymin < 1e-9 {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let px = |x: f64| M + (x - xmin) / (xmax - xmin) * (W - 2.0 * M);
        let py = |y: f64| H - M - (y - ymin) / (ymax - ymin) * (H - 2.0 * M);
        let polyline = |pts: &[(f64, f64)]| {
            pts.iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            svg,
            r#"<path d="M{M} {} H{} M{M} {} V{M}" stroke="black" fill="none"/>"#,
            H - M,
            W - M,
            H - M
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log2 N</text>"#,
            W / 2.0,
            H - 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">log2 error</text>"#,
            H / 2.0,
            H / 2.0
        );
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="gray" stroke-dasharray="6 4" fill="none"/>"#,
            polyline(&reference)
        );
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
            polyline(&logs)
        );
        for &(x, y) in &logs {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                px(x),
                py(y)
            );
        }
        let slope = self.slope.map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">fitted slope {slope}; reference slope -2 (dashed); log exponent 3(d-1) = {}</text>"#,
            W - M,
            M - 10.0,
            self.log_exponent
        );
        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
