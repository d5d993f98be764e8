//! Minimal SVG output with unit edge length.

use std::fmt::Write;

use hexvis::{Grid, HexVertex};

/// Pixels per unit of edge length.
const SCALE: f64 = 24.0;

#[derive(Default)]
pub struct Layers<'a> {
    pub robots: &'a [HexVertex],
    /// Drawn as rings, e.g. pattern targets.
    pub highlight: &'a [HexVertex],
    pub caption: Option<String>,
}

pub fn render(g: &Grid, layers: &Layers<'_>) -> String {
    let pos = |v: HexVertex| {
        let (x, y) = g.position(v).expect("vertex of the grid");
        (x, -y)
    };
    let pts: Vec<(f64, f64)> = g.vertices().map(pos).collect();
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - 1.0;
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - 1.0;
    let mut max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    if layers.caption.is_some() {
        max_y += 1.0;
    }
    let (w, h) = (max_x - min_x, max_y - min_y);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{min_x:.3} {min_y:.3} {w:.3} {h:.3}">"#,
        w * SCALE,
        h * SCALE
    );
    let _ = writeln!(out, r##"<rect x="{min_x:.3}" y="{min_y:.3}" width="{w:.3}" height="{h:.3}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<g stroke="#9a9a9a" stroke-width="0.05">"##);
    for v in g.vertices() {
        for n in g.neighbors(v).expect("vertex of the grid") {
            if v < n {
                let ((x1, y1), (x2, y2)) = (pos(v), pos(n));
                let _ = writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
            }
        }
    }
    out.push_str("</g>\n");
    for v in g.corners() {
        let (x, y) = pos(v);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="0.12" fill="#c8c8c8"/>"##);
    }
    for &v in layers.highlight {
        let (x, y) = pos(v);
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="0.38" fill="none" stroke="#d62728" stroke-width="0.08"/>"##
        );
    }
    for &v in layers.robots {
        let (x, y) = pos(v);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="0.25" fill="#111111"><title>{v}</title></circle>"##);
    }
    if let Some(caption) = &layers.caption {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="0.8" font-family="sans-serif">{}</text>"#,
            min_x + 0.5,
            max_y - 0.4,
            escape(caption)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_per_edge_and_one_dot_per_robot() {
        let g = Grid::new(2).unwrap();
        let robots = [HexVertex::new(0, 0, 0), HexVertex::new(1, 1, 1)];
        let svg = render(&g, &Layers { robots: &robots, highlight: &[], caption: Some("a < b".into()) });
        let edges: usize = g.vertices().map(|v| g.neighbors(v).unwrap().len()).sum::<usize>() / 2;
        assert_eq!(svg.matches("<line").count(), edges);
        assert_eq!(svg.matches("<title>").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn edges_have_unit_length() {
        let g = Grid::new(3).unwrap();
        for v in g.vertices() {
            let (x, y) = g.position(v).unwrap();
            for n in g.neighbors(v).unwrap() {
                let (a, b) = g.position(n).unwrap();
                assert!(((x - a).hypot(y - b) - 1.0).abs() < 1e-9);
            }
        }
    }
}
