//! Deterministic SVG line and scatter plots.
//!
//! Every figure uses the same 640x480 viewBox and plotting frame, and all
//! coordinates are printed with three decimals, so identical data gives
//! identical bytes.

use std::fmt::Write as _;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
pub const LEFT: f64 = 70.0;
pub const RIGHT: f64 = 20.0;
pub const TOP: f64 = 40.0;
pub const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Line { points: Vec<(f64, f64)>, color: usize, width: f64, dashed: bool },
    Points { points: Vec<(f64, f64)>, color: usize },
}

impl Series {
    pub fn line(points: Vec<(f64, f64)>, color: usize) -> Self {
        Series::Line { points, color, width: 1.0, dashed: false }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        match self {
            Series::Line { points, .. } | Series::Points { points, .. } => points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Draw the `y = x` reference line across the frame.
    pub diagonal: bool,
    /// Fixed data ranges; computed from the series when absent.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

/// Maps data coordinates to the plotting frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn to_px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let fx = (x - self.x.0) / (self.x.1 - self.x.0);
        let fy = (y - self.y.0) / (self.y.1 - self.y.0);
        (LEFT + fx * (WIDTH - LEFT - RIGHT), HEIGHT - BOTTOM - fy * (HEIGHT - TOP - BOTTOM))
    }

    pub fn from_px(&self, (px, py): (f64, f64)) -> (f64, f64) {
        let fx = (px - LEFT) / (WIDTH - LEFT - RIGHT);
        let fy = (HEIGHT - BOTTOM - py) / (HEIGHT - TOP - BOTTOM);
        (self.x.0 + fx * (self.x.1 - self.x.0), self.y.0 + fy * (self.y.1 - self.y.0))
    }
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { 0.5 * lo.abs() } else { 0.5 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

impl Figure {
    pub fn frame(&self) -> Frame {
        let all = || self.series.iter().flat_map(|s| s.points().iter().copied());
        let mut x = self.x_range.unwrap_or_else(|| span(all().map(|p| p.0)));
        let mut y = self.y_range.unwrap_or_else(|| span(all().map(|p| p.1)));
        if self.diagonal && self.x_range.is_none() && self.y_range.is_none() {
            let lo = x.0.min(y.0);
            let hi = x.1.max(y.1);
            x = (lo, hi);
            y = (lo, hi);
        }
        Frame { x, y }
    }

    pub fn render(&self) -> String {
        let frame = self.frame();
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        self.axes(&mut s, &frame);
        let _ = writeln!(
            s,
            r#"<g class="plot" data-xmin="{:?}" data-xmax="{:?}" data-ymin="{:?}" data-ymax="{:?}">"#,
            frame.x.0, frame.x.1, frame.y.0, frame.y.1
        );
        if self.diagonal {
            let lo = frame.x.0.max(frame.y.0);
            let hi = frame.x.1.min(frame.y.1);
            let (a, b) = (frame.to_px((lo, lo)), frame.to_px((hi, hi)));
            let _ = writeln!(
                s,
                r##"<line class="diagonal" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#888888" stroke-dasharray="4 3"/>"##,
                a.0, a.1, b.0, b.1
            );
        }
        for series in &self.series {
            match series {
                Series::Line { points, color, width, dashed } => {
                    let coords: Vec<String> = points
                        .iter()
                        .map(|&p| {
                            let (x, y) = frame.to_px(p);
                            format!("{x:.3},{y:.3}")
                        })
                        .collect();
                    let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{width}"{dash}/>"#,
                        coords.join(" "),
                        PALETTE[color % PALETTE.len()]
                    );
                }
                Series::Points { points, color } => {
                    for &p in points {
                        let (x, y) = frame.to_px(p);
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{}" fill-opacity="0.7"/>"#,
                            PALETTE[color % PALETTE.len()]
                        );
                    }
                }
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }

    fn axes(&self, s: &mut String, frame: &Frame) {
        let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
        let (x1, y1) = (WIDTH - RIGHT, TOP);
        let _ = writeln!(s, r#"<rect x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = frame.x.0 + f * (frame.x.1 - frame.x.0);
            let yv = frame.y.0 + f * (frame.y.1 - frame.y.0);
            let (px, _) = frame.to_px((xv, frame.y.0));
            let (_, py) = frame.to_px((frame.x.0, yv));
            let _ = writeln!(s, r#"<line x1="{px:.3}" y1="{y0:.3}" x2="{px:.3}" y2="{:.3}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(s, r#"<text x="{px:.3}" y="{:.3}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick(xv));
            let _ = writeln!(s, r#"<line x1="{:.3}" y1="{py:.3}" x2="{x0:.3}" y2="{py:.3}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, tick(yv));
        }
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.3}" text-anchor="middle" transform="rotate(-90 18 {:.3})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
    }
}

fn tick(v: f64) -> String {
    let t = format!("{v:.3}");
    if t == "-0.000" { "0.000".into() } else { t }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Polyline vertices in data coordinates, recovered from rendered SVG.
pub fn parse_polylines(svg: &str) -> (Frame, Vec<Vec<(f64, f64)>>) {
    let attr = |line: &str, name: &str| -> Option<f64> {
        let key = format!("{name}=\"");
        let start = line.find(&key)? + key.len();
        line[start..].split('"').next()?.parse().ok()
    };
    let mut frame = Frame { x: (0.0, 1.0), y: (0.0, 1.0) };
    let mut lines = Vec::new();
    for line in svg.lines() {
        if line.starts_with("<g class=\"plot\"") {
            frame = Frame {
                x: (attr(line, "data-xmin").unwrap_or(0.0), attr(line, "data-xmax").unwrap_or(1.0)),
                y: (attr(line, "data-ymin").unwrap_or(0.0), attr(line, "data-ymax").unwrap_or(1.0)),
            };
        }
        if let Some(rest) = line.strip_prefix("<polyline points=\"") {
            let pts = rest.split('"').next().unwrap_or("");
            let px: Vec<(f64, f64)> = pts
                .split_whitespace()
                .filter_map(|p| {
                    let (x, y) = p.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect();
            lines.push(px);
        }
    }
    let data = lines.into_iter().map(|l| l.into_iter().map(|p| frame.from_px(p)).collect()).collect();
    (frame, data)
}
