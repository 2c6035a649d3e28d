//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    /// Polylines; a series may consist of several disjoint pieces.
    pub pieces: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub notes: Vec<String>,
    pub series: Vec<Series>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in series.iter().flat_map(|s| s.pieces.iter().flatten()) {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(*x), b.1.max(*x), b.2.min(*y), b.3.max(*y));
        }
    }
    if !b.0.is_finite() {
        return (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let w = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
        (lo - w, hi + w)
    };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = bounds(&self.series);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="dimgray" stroke-width="1"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        let _ = writeln!(o, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 14.0, escape(&self.x_label));
        let _ = writeln!(
            o,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (lo, hi, pos) in [(x0, x1, true), (y0, y1, false)] {
            for j in 0..=4 {
                let v = lo + (hi - lo) * j as f64 / 4.0;
                let label = format!("{v:.3}");
                if pos {
                    let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="dimgray">{label}</text>"#, sx(v), HEIGHT - MARGIN + 16.0);
                } else {
                    let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="dimgray">{label}</text>"#, MARGIN - 4.0, sy(v) + 4.0);
                }
            }
        }
        for s in &self.series {
            for piece in &s.pieces {
                let pts: Vec<String> = piece
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                    .collect();
                match s.style {
                    Style::Line => {
                        let _ = writeln!(
                            o,
                            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                            s.color,
                            pts.join(" ")
                        );
                    }
                    Style::Dots => {
                        for p in pts {
                            let (cx, cy) = p.split_once(',').expect("formatted pair");
                            let _ = writeln!(o, r#"<circle cx="{cx}" cy="{cy}" r="1.2" fill="{}"/>"#, s.color);
                        }
                    }
                }
            }
        }
        let mut y = MARGIN + 16.0;
        for s in &self.series {
            let _ = writeln!(o, r#"<text x="{:.2}" y="{y:.2}" fill="{}">{}</text>"#, MARGIN + 8.0, s.color, escape(&s.label));
            y += 15.0;
        }
        for n in &self.notes {
            let _ = writeln!(o, r#"<text x="{:.2}" y="{y:.2}" fill="black">{}</text>"#, MARGIN + 8.0, escape(n));
            y += 15.0;
        }
        o.push_str("</svg>\n");
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_self_contained_document() {
        let plot = Plot {
            title: "a < b".into(),
            series: vec![Series {
                label: "s".into(),
                color: "#1f77b4",
                style: Style::Line,
                pieces: vec![vec![(0.0, 0.0), (1.0, 2.0)]],
            }],
            ..Default::default()
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("href"));
    }
}
