//! Static SVG polyline of a planar trajectory.

use std::fmt::Write;

pub const SIZE: u32 = 800;

/// Equal-aspect view of `points` padded by 5% of the larger extent, with the
/// y axis pointing up.
pub fn polyline(points: &[(f64, f64)]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let pad = 0.05 * span;
    let side = span + 2.0 * pad;
    let cx = 0.5 * (x0 + x1);
    let cy = 0.5 * (y0 + y1);
    let (vx, vy) = (cx - 0.5 * side, -cy - 0.5 * side);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="{} {} {} {}">"#,
        num(vx),
        num(vy),
        num(side),
        num(side)
    );
    let _ = write!(
        s,
        r#"<polyline fill="none" stroke="black" stroke-width="{}" points=""#,
        num(side / SIZE as f64)
    );
    for (i, &(x, y)) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", num(x), num(-y));
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_box_is_square_with_margin() {
        let s = polyline(&[(0.0, 0.0), (2.0, 1.0)]);
        // span 2, pad 0.1, side 2.2, centred on (1, -0.5) after the flip
        assert!(
            s.contains(r#"viewBox="-0.10000000000000009 -1.6 2.2 2.2""#),
            "{s}"
        );
        assert!(s.contains("0.0,-0.0 2.0,-1.0"));
        assert!(s.contains(r#"width="800" height="800""#));
    }

    #[test]
    fn empty_input_still_renders() {
        assert!(polyline(&[]).contains("<polyline"));
    }
}
