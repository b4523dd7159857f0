//! SVG drawing of a packing's cross-section.
//!
//! Depth runs left to right and height bottom to top. Placements are drawn as
//! labelled rectangles and the remaining free boxes are shaded.

use std::fmt::Write as _;

use crate::exact::Rational;
use crate::model::{free_space, validate, Instance, Solution, Violation};

/// Drawing width of the container in pixels; the height keeps the aspect ratio.
const CANVAS: f64 = 600.0;
const MARGIN: f64 = 20.0;

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

/// Renders the solution, or returns the validator's complaints.
pub fn render_svg(instance: &Instance, solution: &Solution) -> Result<String, Vec<Violation>> {
    validate(instance, solution)?;
    let scale = CANVAS / instance.depth.to_f64();
    let height = instance.height.to_f64() * scale;
    let px = |v: &Rational| v.to_f64() * scale;
    // svg y grows downwards
    let y = |top: &Rational| MARGIN + height - px(top);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = CANVAS + 2.0 * MARGIN,
        h = height + 2.0 * MARGIN,
    );
    let _ = writeln!(
        out,
        r#"<title>cross-section, objective {}</title>"#,
        solution.value
    );
    let _ = writeln!(
        out,
        r#"<rect class="container" x="{MARGIN:.3}" y="{MARGIN:.3}" width="{CANVAS:.3}" height="{height:.3}" fill="white" stroke="black" stroke-width="2"/>"#
    );
    for h in free_space(instance, solution) {
        let top = &h.origin_z + &h.height;
        let _ = writeln!(
            out,
            r##"<rect class="free" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#d9d9d9" fill-opacity="0.6" stroke="#969696" stroke-dasharray="4 3"/>"##,
            MARGIN + px(&h.origin_x),
            y(&top),
            px(&h.depth),
            px(&h.height),
        );
    }
    for p in &solution.placements {
        let (x, w, hgt) = (MARGIN + px(&p.origin_x), px(&p.depth), px(&p.height));
        let top = y(&p.top());
        let _ = writeln!(
            out,
            r#"<rect class="placement" data-item="{}" x="{x:.3}" y="{top:.3}" width="{w:.3}" height="{hgt:.3}" fill="{}" stroke="black"/>"#,
            p.item,
            PALETTE[p.item % PALETTE.len()],
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            x + w / 2.0,
            top + hgt / 2.0,
            p.item,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
