//! SVG rendering of planar point sets with their occupied lines.

use std::fmt::Write;

use crate::lattice::{line_profile, PointSet};

const UNIT: i64 = 40;

/// Draws `points` on a unit grid. Occupied rows, columns and anti-diagonals
/// are drawn as coloured guide lines; the anti-diagonals run at −45°.
pub fn point_set_svg(points: &PointSet) -> String {
    let (x0, x1, y0, y1) =
        points.iter().fold((0, 0, 0, 0), |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)));
    let (x0, x1, y0, y1) = (x0 - 1, x1 + 1, y0 - 1, y1 + 1);
    let width = (x1 - x0) * UNIT;
    let height = (y1 - y0) * UNIT;
    // lattice (x, y) to pixels, y pointing up
    let px = |x: i64| (x - x0) * UNIT;
    let py = |y: i64| (y1 - y) * UNIT;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<g stroke="#e4e4e4" stroke-width="1">"##);
    for x in x0..=x1 {
        let _ = writeln!(out, r#"<line x1="{0}" y1="0" x2="{0}" y2="{height}"/>"#, px(x));
    }
    for y in y0..=y1 {
        let _ = writeln!(out, r#"<line x1="0" y1="{0}" x2="{width}" y2="{0}"/>"#, py(y));
    }
    let _ = writeln!(out, "</g>");

    let profile = line_profile(points);
    let _ = writeln!(out, r##"<g stroke-width="2" stroke-opacity="0.6">"##);
    for &y in &profile.rows {
        let _ = writeln!(out, r##"<line class="row" stroke="#d1495b" x1="0" y1="{0}" x2="{width}" y2="{0}"/>"##, py(y));
    }
    for &x in &profile.cols {
        let _ =
            writeln!(out, r##"<line class="col" stroke="#00798c" x1="{0}" y1="0" x2="{0}" y2="{height}"/>"##, px(x));
    }
    for &c in &profile.diags {
        // clip x + y = c to the box
        let xa = x0.max(c - y1);
        let xb = x1.min(c - y0);
        if xa <= xb {
            let _ = writeln!(
                out,
                r##"<line class="diag" stroke="#edae49" x1="{}" y1="{}" x2="{}" y2="{}"/>"##,
                px(xa),
                py(c - xa),
                px(xb),
                py(c - xb)
            );
        }
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g fill="#30343f">"##);
    for p in points.iter() {
        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}"/>"#, px(p.x), py(p.y), UNIT / 5);
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}
