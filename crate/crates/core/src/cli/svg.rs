//! Minimal SVG writer: axes box, scatter points, polylines, polygons.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

pub struct Plot {
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
    x_label: String,
    y_label: String,
}

impl Plot {
    /// Plot whose data window covers every `(x, y)` in `extent`, padded by 5%.
    pub fn covering(extent: &[(f64, f64)], x_label: &str, y_label: &str) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in extent {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x0.is_finite() && x1.is_finite()) {
            (x0, x1) = (-1.0, 1.0);
        }
        if !(y0.is_finite() && y1.is_finite()) {
            (y0, y1) = (-1.0, 1.0);
        }
        let pad = |a: f64, b: f64| {
            let d = if b > a { 0.05 * (b - a) } else { 1.0 };
            (a - d, b + d)
        };
        Self {
            x_range: pad(x0, x1),
            y_range: pad(y0, y1),
            body: String::new(),
            x_label: x_label.into(),
            y_label: y_label.into(),
        }
    }

    fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b) = self.x_range;
        let (c, d) = self.y_range;
        (
            MARGIN + (x - a) / (b - a) * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (y - c) / (d - c) * (HEIGHT - 2.0 * MARGIN),
        )
    }

    pub fn points(&mut self, pts: &[(f64, f64)], radius: f64, color: &str) {
        for &(x, y) in pts {
            let (px, py) = self.to_px(x, y);
            let _ = writeln!(self.body, r#"<circle cx="{px:.2}" cy="{py:.2}" r="{radius}" fill="{color}"/>"#);
        }
    }

    fn coords(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&(x, y)| {
                let (px, py) = self.to_px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64) {
        let c = self.coords(pts);
        let _ = writeln!(
            self.body,
            r#"<polyline points="{c}" fill="none" stroke="{color}" stroke-width="{width}"/>"#
        );
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], color: &str, opacity: f64) {
        let c = self.coords(pts);
        let _ = writeln!(
            self.body,
            r#"<polygon points="{c}" fill="{color}" fill-opacity="{opacity}" stroke="{color}" stroke-width="1"/>"#
        );
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        let ticks = [
            (MARGIN, HEIGHT - MARGIN + 20.0, "start", format!("{:.3}", self.x_range.0)),
            (WIDTH - MARGIN, HEIGHT - MARGIN + 20.0, "end", format!("{:.3}", self.x_range.1)),
            (MARGIN - 5.0, HEIGHT - MARGIN, "end", format!("{:.3}", self.y_range.0)),
            (MARGIN - 5.0, MARGIN + 10.0, "end", format!("{:.3}", self.y_range.1)),
        ];
        for (x, y, anchor, text) in ticks {
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{y}" font-size="12" text-anchor="{anchor}" font-family="sans-serif">{text}</text>"#
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 15.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 15 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            self.y_label
        );
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}
