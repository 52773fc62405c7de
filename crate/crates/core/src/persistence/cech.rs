//! Planar minimum enclosing circles.

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Radius of the smallest disc containing three planar points.
///
/// For an acute triangle this is the circumradius; for right, obtuse and
/// degenerate triangles it is half the longest side. Equivalently it is the
/// smallest `t` at which the three radius-`t` balls share a point.
pub fn min_enclosing_radius(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let mut sides = [dist2(b, c), dist2(a, c), dist2(a, b)];
    sides.sort_by(f64::total_cmp);
    let [s0, s1, s2] = sides;
    if s2 >= s0 + s1 {
        return 0.5 * s2.sqrt();
    }
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    // R = abc / (4 * area) and 4 * area = 2 |cross|.
    (s0 * s1 * s2).sqrt() / (2.0 * cross.abs())
}
