//! SVG and CSV output. SVG uses action coordinates at 200 px per unit with
//! the y-axis pointing up.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

pub const PX_PER_UNIT: f64 = 200.0;
const PAD: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Polygon { pts: Vec<(f64, f64)>, fill: String },
    Points { pts: Vec<(f64, f64)>, color: String },
    Label { at: (f64, f64), text: String },
}

/// Collects shapes in action coordinates and renders them with a common
/// viewport.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SvgPlot {
    shapes: Vec<Shape>,
}

impl SvgPlot {
    pub fn polygon(&mut self, pts: &[(f64, f64)], fill: &str) -> &mut Self {
        self.shapes.push(Shape::Polygon { pts: pts.to_vec(), fill: fill.into() });
        self
    }

    pub fn rect(&mut self, x0: f64, x1: f64, y0: f64, y1: f64, fill: &str) -> &mut Self {
        self.polygon(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)], fill)
    }

    pub fn points(&mut self, pts: &[(f64, f64)], color: &str) -> &mut Self {
        self.shapes.push(Shape::Points { pts: pts.to_vec(), color: color.into() });
        self
    }

    pub fn label(&mut self, at: (f64, f64), text: &str) -> &mut Self {
        self.shapes.push(Shape::Label { at, text: text.into() });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut add = |(x, y): (f64, f64)| {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        };
        for s in &self.shapes {
            match s {
                Shape::Polygon { pts, .. } | Shape::Points { pts, .. } => pts.iter().copied().for_each(&mut add),
                Shape::Label { at, .. } => add(*at),
            }
        }
        if !b.0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        b
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let w = (x1 - x0) * PX_PER_UNIT + 2.0 * PAD;
        let h = (y1 - y0) * PX_PER_UNIT + 2.0 * PAD;
        let map = |(x, y): (f64, f64)| (PAD + (x - x0) * PX_PER_UNIT, h - PAD - (y - y0) * PX_PER_UNIT);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
        );
        for s in &self.shapes {
            match s {
                Shape::Polygon { pts, fill } => {
                    let p: Vec<String> = pts
                        .iter()
                        .map(|&q| {
                            let (a, b) = map(q);
                            format!("{a:.3},{b:.3}")
                        })
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" fill="{fill}" fill-opacity="0.35" stroke="black" stroke-width="1"/>"#,
                        p.join(" ")
                    );
                }
                Shape::Points { pts, color } => {
                    for &q in pts {
                        let (a, b) = map(q);
                        let _ = writeln!(out, r#"<circle cx="{a:.3}" cy="{b:.3}" r="1" fill="{color}"/>"#);
                    }
                }
                Shape::Label { at, text } => {
                    let (a, b) = map(*at);
                    let _ = writeln!(out, r#"<text x="{a:.3}" y="{b:.3}" font-size="12">{}</text>"#, escape(text));
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// CSV with a header row and full-precision values.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes via a temporary file and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
