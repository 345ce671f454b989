//! Minimal self-contained SVG line plots on a fixed 800x500 canvas.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 640.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 440.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.to_string(), points }
    }
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Dashed vertical markers.
    pub vlines: Vec<f64>,
    /// Dotted horizontal reference lines.
    pub hlines: Vec<f64>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            series: Vec::new(),
            vlines: Vec::new(),
            hlines: Vec::new(),
        }
    }

    fn y_value(&self, y: f64) -> Option<f64> {
        match (self.log_y, y.is_finite()) {
            (_, false) => None,
            (true, _) if y <= 0.0 => None,
            (true, _) => Some(y.log10()),
            (false, _) => Some(y),
        }
    }

    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|x| x.is_finite());
        let (x_min, x_max) = padded(bounds(xs.chain(self.vlines.iter().copied())), false);
        let ys = self.series.iter().flat_map(|s| s.points.iter().filter_map(|p| self.y_value(p.1)));
        let hs = self.hlines.iter().filter_map(|&y| self.y_value(y));
        let (y_min, y_max) = padded(bounds(ys.chain(hs)), self.log_y);
        let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT);
        let sy = |y: f64| BOTTOM - (y - y_min) / (y_max - y_min) * (BOTTOM - TOP);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            (LEFT + RIGHT) / 2.0,
            escape(&self.title)
        );

        // axes and ticks
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            RIGHT - LEFT,
            BOTTOM - TOP
        );
        for t in ticks(x_min, x_max) {
            let x = sx(t);
            let _ =
                writeln!(out, r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="black"/>"#, BOTTOM + 5.0);
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                BOTTOM + 18.0,
                tick_label(t)
            );
        }
        let y_ticks = if self.log_y { log_ticks(y_min, y_max) } else { ticks(y_min, y_max) };
        for t in y_ticks {
            let y = sy(t);
            let label = if self.log_y { format!("1e{}", t.round() as i64) } else { tick_label(t) };
            let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 8.0, y + 4.0);
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (LEFT + RIGHT) / 2.0,
            BOTTOM + 42.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
            (TOP + BOTTOM) / 2.0,
            escape(&self.y_label)
        );

        for &v in &self.vlines {
            let x = sx(v);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="black" stroke-dasharray="6,4"/>"#
            );
        }
        for &h in &self.hlines {
            if let Some(y) = self.y_value(h).map(sy) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#777777" stroke-dasharray="2,3"/>"##
                );
            }
        }

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            // break the line at points that cannot be drawn
            let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for &(x, y) in &series.points {
                match self.y_value(y) {
                    Some(y) if x.is_finite() => segments.last_mut().unwrap().push((sx(x), sy(y))),
                    _ => segments.push(Vec::new()),
                }
            }
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            let ly = TOP + 10.0 + 20.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                RIGHT + 15.0,
                RIGHT + 40.0
            );
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, RIGHT + 46.0, ly + 4.0, escape(&series.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn padded((lo, hi): (f64, f64), log: bool) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    if log {
        (lo.floor(), hi.ceil())
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|j| j as f64 * step).collect()
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (first, last) = (lo.ceil() as i64, hi.floor() as i64);
    let stride = ((last - first) / 8 + 1).max(1) as usize;
    (first..=last).step_by(stride).map(|d| d as f64).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", if v.abs() < 1e-12 { 0.0 } else { v });
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
