//! Polyline rendering in a fixed 1000×1000 view box.

use std::fmt::Write as _;

const SIZE: f64 = 1000.0;
const MARGIN: f64 = 20.0;

/// Draws `points` as one polyline, scaled to fill the view box with the
/// `y` axis pointing up. Non-finite points are skipped.
pub fn polyline(points: &[(f64, f64)], title: &str) -> String {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (sx, sy) = ((SIZE - 2.0 * MARGIN) / span(x0, x1), (SIZE - 2.0 * MARGIN) / span(y0, y1));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    out.push_str(r#"<polyline fill="none" stroke="black" stroke-width="1" points=""#);
    for (i, &(x, y)) in finite.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let px = MARGIN + (x - x0) * sx;
        let py = SIZE - MARGIN - (y - y0) * sy;
        let _ = write!(out, "{px:.3},{py:.3}");
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
