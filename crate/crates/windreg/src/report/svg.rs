//! A minimal SVG writer: just the shapes and text the report figures need.
//!
//! Every coordinate is asserted finite before formatting, so a NaN anywhere
//! upstream fails loudly instead of producing a broken document.

use std::fmt::Write as _;

/// Formats one coordinate with two decimals.
fn c(value: f64) -> String {
    assert!(value.is_finite(), "non-finite SVG coordinate");
    format!("{value:.2}")
}

/// XML-escapes text content and attribute values.
pub fn escape_text(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// An SVG document under construction; `finish` wraps the body in the root
/// element.
pub struct SvgDocument {
    width: f64,
    height: f64,
    body: String,
}

impl SvgDocument {
    pub fn new(width: f64, height: f64) -> Self {
        assert!(width > 0.0 && height > 0.0, "document size must be positive");
        Self { width, height, body: String::new() }
    }

    pub fn rect(&mut self, x: f64, y: f64, width: f64, height: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}"/>"#,
            c(x),
            c(y),
            c(width),
            c(height),
            fill,
            stroke,
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}"/>"#,
            c(x1),
            c(y1),
            c(x2),
            c(y2),
            stroke,
            c(width),
        );
    }

    pub fn dashed_line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}" stroke-dasharray="5 4"/>"#,
            c(x1),
            c(y1),
            c(x2),
            c(y2),
            stroke,
            c(width),
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let coordinates: Vec<String> =
            points.iter().map(|&(x, y)| format!("{},{}", c(x), c(y))).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            coordinates.join(" "),
            stroke,
            c(width),
        );
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}"/>"#,
            c(cx),
            c(cy),
            c(r),
            fill,
        );
    }

    /// `anchor` is an SVG text-anchor: "start", "middle", or "end".
    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="{}">{}</text>"#,
            c(x),
            c(y),
            c(size),
            anchor,
            escape_text(content),
        );
    }

    /// Text rotated 90° counter-clockwise around its own position.
    pub fn vertical_text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="{}" transform="rotate(-90 {} {})">{}</text>"#,
            c(x),
            c(y),
            c(size),
            anchor,
            c(x),
            c(y),
            escape_text(content),
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">\n{body}</svg>\n",
            w = c(self.width),
            h = c(self.height),
            body = self.body,
        )
    }
}

/// Affine map from a data interval onto a pixel interval; a zero-width
/// domain is widened by half a unit on each side so it stays invertible.
pub struct LinearScale {
    domain_min: f64,
    domain_span: f64,
    range_min: f64,
    range_span: f64,
}

impl LinearScale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        let (mut d0, mut d1) = domain;
        assert!(d0.is_finite() && d1.is_finite(), "non-finite scale domain");
        assert!(d0 <= d1, "domain must be ordered");
        if d0 == d1 {
            d0 -= 0.5;
            d1 += 0.5;
        }
        Self {
            domain_min: d0,
            domain_span: d1 - d0,
            range_min: range.0,
            range_span: range.1 - range.0,
        }
    }

    pub fn apply(&self, value: f64) -> f64 {
        self.range_min + (value - self.domain_min) / self.domain_span * self.range_span
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_min, self.domain_min + self.domain_span)
    }
}

/// `count + 1` evenly spaced values covering the scale's domain.
pub fn ticks(scale: &LinearScale, count: usize) -> Vec<f64> {
    let (min, max) = scale.domain();
    (0..=count).map(|i| min + (max - min) * i as f64 / count as f64).collect()
}
