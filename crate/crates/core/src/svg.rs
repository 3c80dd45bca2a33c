//! SVG 1.1 drawings of circle frameworks.

use std::fmt::Write;

use crate::framework::CFramework;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// Draw a segment between the centers of each edge's circles.
    pub edges: bool,
    pub stroke_width: Option<f64>,
    /// Fraction of the larger bounding-box side added on every side.
    pub margin: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            edges: true,
            stroke_width: None,
            margin: 0.05,
        }
    }
}

// `+ 0.0` turns -0 into 0
fn num(v: f64) -> String {
    format!("{}", v + 0.0)
}

/// Stroke-only circles; y is negated so the picture is not mirrored.
pub fn render_svg(f: &CFramework, options: &RenderOptions) -> String {
    let cs = f.circles();
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for c in cs {
        x0 = x0.min(c.x - c.r);
        x1 = x1.max(c.x + c.r);
        y0 = y0.min(-c.y - c.r);
        y1 = y1.max(-c.y + c.r);
    }
    let side = (x1 - x0).max(y1 - y0);
    let pad = options.margin * side;
    let stroke = options.stroke_width.unwrap_or(side / 500.0);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        num(x0 - pad),
        num(y0 - pad),
        num(x1 - x0 + 2.0 * pad),
        num(y1 - y0 + 2.0 * pad)
    );
    let _ = writeln!(
        s,
        "<g fill=\"none\" stroke=\"black\" stroke-width=\"{}\">",
        num(stroke)
    );
    for c in cs {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
            num(c.x),
            num(-c.y),
            num(c.r)
        );
    }
    if options.edges {
        for &(i, j) in f.edges() {
            let (a, b) = (f.circle(i), f.circle(j));
            let _ = writeln!(
                s,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                num(a.x),
                num(-a.y),
                num(b.x),
                num(-b.y)
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
