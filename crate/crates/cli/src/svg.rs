//! Minimal standalone SVG line charts with optional log axes.

use std::fmt::Write;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 270.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const GRID: &str = "#e5e5e5";
const AXIS: &str = "#333333";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Markers,
    LineMarkers,
    /// Only used for reference lines.
    Dotted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub palette: usize,
}

impl Series {
    pub fn new(
        name: impl Into<String>,
        points: Vec<(f64, f64)>,
        style: Style,
        palette: usize,
    ) -> Self {
        Self {
            name: name.into(),
            points,
            style,
            palette,
        }
    }
}

/// Horizontal line across the whole plot area.
#[derive(Debug, Clone, PartialEq)]
pub struct RefLine {
    pub name: String,
    pub y: f64,
    pub palette: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub reference_lines: Vec<RefLine>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// One axis: data range in transformed (possibly log10) units.
#[derive(Debug, Clone, Copy)]
struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter_map(|v| transform(v, log)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
        } else if hi <= lo {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Self { log, lo, hi })
    }

    fn unit(&self, t: f64) -> f64 {
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (transformed units) and their labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let decades = (self.hi - self.lo) as i64;
            let every = (decades / 10 + 1).max(1);
            (self.lo as i64..=self.hi as i64)
                .filter(|d| (d - self.lo as i64) % every == 0)
                .map(|d| (d as f64, format!("1e{d}")))
                .collect()
        } else {
            let step = nice_step((self.hi - self.lo) / 6.0);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step + 1e-9).floor() as i64;
            (first..=last)
                .map(|k| {
                    let v = k as f64 * step;
                    (v, trim_number(v))
                })
                .collect()
        }
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    if !v.is_finite() {
        return None;
    }
    if log {
        (v > 0.0).then(|| v.log10())
    } else {
        Some(v)
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

impl LineChart {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
            reference_lines: Vec::new(),
        }
    }

    /// Renders a complete SVG document. Points that cannot be shown on a log
    /// axis (zero or negative) are dropped.
    pub fn render(&self) -> String {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0));
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(self.reference_lines.iter().map(|r| r.y));
        let x_axis = Axis::fit(xs, self.log_x).unwrap_or(Axis {
            log: self.log_x,
            lo: 0.0,
            hi: 1.0,
        });
        let y_axis = Axis::fit(ys, self.log_y).unwrap_or(Axis {
            log: self.log_y,
            lo: 0.0,
            hi: 1.0,
        });
        let px = |t: f64| MARGIN_LEFT + x_axis.unit(t) * plot_w;
        let py = |t: f64| MARGIN_TOP + (1.0 - y_axis.unit(t)) * plot_h;
        let to_px = |(x, y): (f64, f64)| -> Option<(f64, f64)> {
            Some((px(transform(x, self.log_x)?), py(transform(y, self.log_y)?)))
        };

        let mut s = String::new();
        let _ = write!(
            s,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="28" text-anchor="middle" font-size="17">{}</text>
"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        s.push_str("<g id=\"grid\">\n");
        for (t, label) in x_axis.ticks() {
            let x = px(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{MARGIN_TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="{GRID}"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
                MARGIN_TOP + plot_h,
                MARGIN_TOP + plot_h + 18.0,
                escape(&label)
            );
        }
        for (t, label) in y_axis.ticks() {
            let y = py(t);
            let _ = writeln!(
                s,
                r#"<line x1="{MARGIN_LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{GRID}"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"#,
                MARGIN_LEFT + plot_w,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                escape(&label)
            );
        }
        s.push_str("</g>\n");

        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="{AXIS}"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(22 {:.2}) rotate(-90)" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        s.push_str("<g id=\"data\">\n");
        for r in &self.reference_lines {
            if let Some(t) = transform(r.y, self.log_y) {
                let y = py(t);
                let _ = writeln!(
                    s,
                    r#"<line x1="{MARGIN_LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="2 4"/>"#,
                    MARGIN_LEFT + plot_w,
                    color(r.palette)
                );
            }
        }
        for series in &self.series {
            let pts: Vec<(f64, f64)> = series.points.iter().filter_map(|&p| to_px(p)).collect();
            let c = color(series.palette);
            if matches!(
                series.style,
                Style::Line | Style::Dashed | Style::LineMarkers
            ) && pts.len() > 1
            {
                let coords: Vec<String> =
                    pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let dash = if series.style == Style::Dashed {
                    r#" stroke-dasharray="6 4""#
                } else {
                    ""
                };
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.8"{dash}/>"#,
                    coords.join(" ")
                );
            }
            if matches!(series.style, Style::Markers | Style::LineMarkers) {
                for (x, y) in &pts {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="{c}" stroke-width="1.4"/>"#
                    );
                }
            }
        }
        s.push_str("</g>\n");

        s.push_str("<g id=\"legend\" font-size=\"12\">\n");
        let legend_x = MARGIN_LEFT + plot_w + 16.0;
        let entries = self
            .series
            .iter()
            .map(|se| (se.name.as_str(), se.palette, se.style))
            .chain(
                self.reference_lines
                    .iter()
                    .map(|r| (r.name.as_str(), r.palette, Style::Dotted)),
            );
        for (i, (name, palette, style)) in entries.enumerate() {
            let y = MARGIN_TOP + 10.0 + i as f64 * 18.0;
            let c = color(palette);
            match style {
                Style::Markers => {
                    let _ = write!(
                        s,
                        r#"<circle cx="{:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="{c}" stroke-width="1.4"/>"#,
                        legend_x + 12.0
                    );
                }
                _ => {
                    let dash = match style {
                        Style::Dashed => r#" stroke-dasharray="6 4""#,
                        Style::Dotted => r#" stroke-dasharray="2 4""#,
                        _ => "",
                    };
                    let _ = write!(
                        s,
                        r#"<line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{c}" stroke-width="1.8"{dash}/>"#,
                        legend_x + 24.0
                    );
                }
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                legend_x + 30.0,
                y + 4.0,
                escape(name)
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}
