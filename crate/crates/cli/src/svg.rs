//! A small SVG emitter for eigenvalue pictures in the complex plane.

use std::fmt::Write;

use num_complex::Complex64;

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

pub struct Plane {
    re: (f64, f64),
    im: (f64, f64),
    body: String,
}

impl Plane {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Plane { re, im, body: String::new() }
    }

    fn x(&self, re: f64) -> f64 {
        PAD + (re - self.re.0) / (self.re.1 - self.re.0) * (SIZE - 2.0 * PAD)
    }

    fn y(&self, im: f64) -> f64 {
        SIZE - PAD - (im - self.im.0) / (self.im.1 - self.im.0) * (SIZE - 2.0 * PAD)
    }

    fn scale(&self) -> (f64, f64) {
        ((SIZE - 2.0 * PAD) / (self.re.1 - self.re.0), (SIZE - 2.0 * PAD) / (self.im.1 - self.im.0))
    }

    pub fn point(&mut self, z: Complex64, color: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, self.x(z.re), self.y(z.im));
    }

    /// Circle of radius `r` about `c`, drawn as an ellipse when the axes differ in scale.
    pub fn circle(&mut self, c: Complex64, r: f64, color: &str) {
        let (sx, sy) = self.scale();
        let _ = writeln!(
            self.body,
            r#"<ellipse cx="{:.2}" cy="{:.2}" rx="{:.2}" ry="{:.2}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            self.x(c.re),
            self.y(c.im),
            r * sx,
            r * sy
        );
    }

    /// The half-line `[0, ∞)` clipped to the frame.
    pub fn half_line(&mut self) {
        if self.re.1 <= 0.0 || self.im.0 > 0.0 || self.im.1 < 0.0 {
            return;
        }
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="3"/>"#,
            self.x(self.re.0.max(0.0)),
            self.y(0.0),
            self.x(self.re.1),
            self.y(0.0)
        );
    }

    fn ticks(&self, out: &mut String) {
        let (x0, x1, y0, y1) = (PAD, SIZE - PAD, PAD, SIZE - PAD);
        let _ = writeln!(out, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="gray"/>"#, x1 - x0, y1 - y0);
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let re = self.re.0 + t * (self.re.1 - self.re.0);
            let im = self.im.0 + t * (self.im.1 - self.im.0);
            let (x, y) = (self.x(re), self.y(im));
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{:.2}" stroke="gray"/>"#, y1 + 5.0);
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{re:.3}</text>"#, y1 + 17.0);
            let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="gray"/>"#, x0 - 5.0);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{im:.3}</text>"#, x0 - 7.0, y + 3.0);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(out, r#"<defs><clipPath id="frame"><rect x="{PAD}" y="{PAD}" width="{0}" height="{0}"/></clipPath></defs>"#, SIZE - 2.0 * PAD);
        self.ticks(&mut out);
        let _ = writeln!(out, r#"<g clip-path="url(#frame)">"#);
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}
