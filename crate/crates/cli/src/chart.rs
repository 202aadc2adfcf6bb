//! Static SVG charts: histogram overlays and families of curves.
//!
//! Output depends only on the input data; all coordinates are printed with
//! fixed precision so reruns are byte-identical.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const BAR_COLOUR: &str = "#1f5fbf";
const MARKER_COLOUR: &str = "#d22b2b";
const LINE_COLOURS: [&str; 6] = ["#d22b2b", "#1f5fbf", "#2e8b3e", "#8a3fbf", "#c77c11", "#333333"];

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    /// Empirical bars `(x, height)` with predicted markers `(x, height)`.
    HistogramOverlay { bars: Vec<(f64, f64)>, markers: Vec<(f64, f64)> },
    /// Named curves sharing one x grid.
    LineFamily { x: Vec<f64>, series: Vec<(String, Vec<f64>)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Embedded verbatim (escaped) in the `<metadata>` element.
    pub metadata: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("nothing to plot")]
    Empty,
    #[error("series {0:?} has a different length from the x grid")]
    Ragged(String),
    #[error("non-finite value in chart data")]
    NonFinite,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Axis range widened to tick multiples, plus the tick step.
fn nice_range(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    };
    let raw = (hi - lo) / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

struct Frame {
    x: (f64, f64, f64),
    y: (f64, f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn axes(svg: &mut String, frame: &Frame, spec: &ChartSpec) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##,
        x1 - x0,
        y1 - y0
    );
    let (lo, hi, step) = frame.x;
    let mut i = 0;
    while lo + i as f64 * step <= hi + step * 1e-9 {
        let v = lo + i as f64 * step;
        let x = frame.px(v);
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/>"##, y1 + 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y1 + 20.0,
            tick_label(v, step)
        );
        i += 1;
    }
    let (lo, hi, step) = frame.y;
    let mut i = 0;
    while lo + i as f64 * step <= hi + step * 1e-9 {
        let v = lo + i as f64 * step;
        let y = frame.py(v);
        let _ = writeln!(svg, r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#000"/>"##, x0 - 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 4.0,
            tick_label(v, step)
        );
        i += 1;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&spec.y_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (x0 + x1) / 2.0,
        escape(&spec.title)
    );
}

fn legend(svg: &mut String, entries: &[(&str, &str, bool)]) {
    let x = WIDTH - RIGHT + 15.0;
    for (i, (label, colour, line)) in entries.iter().enumerate() {
        let y = TOP + 15.0 + 20.0 * i as f64;
        if *line {
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="2"/>"#,
                x + 20.0
            );
        } else {
            let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{:.2}" width="20" height="10" fill="{colour}"/>"#, y - 5.0);
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 26.0, y + 4.0, escape(label));
    }
}

/// Renders `spec` as a standalone SVG 1.1 document.
pub fn render_chart(spec: &ChartSpec) -> Result<String, ChartError> {
    let mut body = String::new();
    match &spec.kind {
        ChartKind::HistogramOverlay { bars, markers } => {
            if bars.is_empty() && markers.is_empty() {
                return Err(ChartError::Empty);
            }
            let all = bars.iter().chain(markers);
            if all.clone().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(ChartError::NonFinite);
            }
            let xmin = all.clone().map(|p| p.0).fold(f64::INFINITY, f64::min) - 0.5;
            let xmax = all.clone().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + 0.5;
            let ymax = all.map(|p| p.1).fold(0.0, f64::max);
            let frame = Frame { x: nice_range(xmin, xmax), y: nice_range(0.0, ymax) };
            axes(&mut body, &frame, spec);
            for &(x, h) in bars {
                let (l, r) = (frame.px(x - 0.4), frame.px(x + 0.4));
                let (top, base) = (frame.py(h), frame.py(0.0));
                let _ = writeln!(
                    body,
                    r#"<rect x="{l:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{BAR_COLOUR}"/>"#,
                    r - l,
                    base - top
                );
            }
            for &(x, h) in markers {
                let _ = writeln!(
                    body,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{MARKER_COLOUR}"/>"#,
                    frame.px(x),
                    frame.py(h)
                );
            }
            legend(&mut body, &[("simulation", BAR_COLOUR, false), ("prediction", MARKER_COLOUR, false)]);
        }
        ChartKind::LineFamily { x, series } => {
            if x.is_empty() || series.is_empty() {
                return Err(ChartError::Empty);
            }
            for (name, ys) in series {
                if ys.len() != x.len() {
                    return Err(ChartError::Ragged(name.clone()));
                }
            }
            let ys = series.iter().flat_map(|(_, v)| v.iter());
            if x.iter().chain(ys.clone()).any(|v| !v.is_finite()) {
                return Err(ChartError::NonFinite);
            }
            let xr =
                (x.iter().copied().fold(f64::INFINITY, f64::min), x.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let yr = (ys.clone().copied().fold(f64::INFINITY, f64::min), ys.copied().fold(f64::NEG_INFINITY, f64::max));
            let frame = Frame { x: nice_range(xr.0, xr.1), y: nice_range(yr.0, yr.1) };
            axes(&mut body, &frame, spec);
            let mut entries = Vec::new();
            for (i, (name, ys)) in series.iter().enumerate() {
                let colour = LINE_COLOURS[i % LINE_COLOURS.len()];
                let pts: Vec<String> =
                    x.iter().zip(ys).map(|(&a, &b)| format!("{:.2},{:.2}", frame.px(a), frame.py(b))).collect();
                if pts.len() == 1 {
                    let _ =
                        writeln!(body, r#"<circle cx="{}" r="3" fill="{colour}"/>"#, pts[0].replace(',', "\" cy=\""));
                } else {
                    let _ = writeln!(
                        body,
                        r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
                        pts.join(" ")
                    );
                }
                entries.push((name.as_str(), colour, true));
            }
            legend(&mut body, &entries);
        }
    }
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<metadata>{}</metadata>", escape(&spec.metadata));
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    svg.push_str(&body);
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ChartKind) -> ChartSpec {
        ChartSpec { kind, title: "t".into(), x_label: "x".into(), y_label: "y".into(), metadata: "{\"a\":1}".into() }
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(nice_range(0.0, 0.93), (0.0, 1.0, 0.2));
        let (lo, hi, step) = nice_range(0.15, 0.41);
        assert!((step - 0.05).abs() < 1e-12 && lo <= 0.15 && hi >= 0.41);
        assert_eq!(tick_label(0.30000000000000004, 0.05), "0.30");
    }

    #[test]
    fn overlay_is_deterministic() {
        let k =
            ChartKind::HistogramOverlay { bars: vec![(3.0, 0.2), (4.0, 0.5)], markers: vec![(3.0, 0.25), (4.0, 0.45)] };
        let a = render_chart(&spec(k.clone())).unwrap();
        assert_eq!(a, render_chart(&spec(k)).unwrap());
        assert!(a.contains("<metadata>{&quot;a&quot;:1}</metadata>"));
        assert_eq!(a.matches("<circle").count(), 2);
    }

    #[test]
    fn single_point_series() {
        let k = ChartKind::LineFamily { x: vec![0.3], series: vec![("E1".into(), vec![15.5])] };
        let svg = render_chart(&spec(k)).unwrap();
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<circle cx="));
    }

    #[test]
    fn empty_and_ragged_data() {
        assert!(matches!(
            render_chart(&spec(ChartKind::HistogramOverlay { bars: vec![], markers: vec![] })),
            Err(ChartError::Empty)
        ));
        let k = ChartKind::LineFamily { x: vec![0.1, 0.2], series: vec![("E0".into(), vec![1.0])] };
        assert!(matches!(render_chart(&spec(k)), Err(ChartError::Ragged(_))));
    }
}
