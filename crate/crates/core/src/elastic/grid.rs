//! Uniform-grid numerics on [0, 1].

/// Spacing of a `t`-point grid.
#[inline]
pub fn spacing(t: usize) -> f64 {
    1.0 / (t - 1) as f64
}

/// Trapezoidal quadrature weights.
pub fn trapz_weights(t: usize) -> Vec<f64> {
    let h = spacing(t);
    let mut w = vec![h; t];
    w[0] = 0.5 * h;
    w[t - 1] = 0.5 * h;
    w
}

/// Linear interpolation of grid samples at `u`, clamped to [0, 1].
#[inline]
pub fn interp(row: &[f64], u: f64) -> f64 {
    let last = row.len() - 1;
    let x = u.clamp(0.0, 1.0) * last as f64;
    let i = (x.floor() as usize).min(last - 1);
    let w = x - i as f64;
    row[i] + w * (row[i + 1] - row[i])
}

/// Central differences with one-sided ends.
pub fn gradient(row: &[f64]) -> Vec<f64> {
    let t = row.len();
    let inv_h = (t - 1) as f64;
    (0..t)
        .map(|i| match i {
            0 => (row[1] - row[0]) * inv_h,
            _ if i == t - 1 => (row[t - 1] - row[t - 2]) * inv_h,
            _ => 0.5 * (row[i + 1] - row[i - 1]) * inv_h,
        })
        .collect()
}

/// Cumulative trapezoidal integral starting at 0.
pub fn cumtrapz(row: &[f64]) -> Vec<f64> {
    let half_h = 0.5 * spacing(row.len());
    let mut out = Vec::with_capacity(row.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in row.windows(2) {
        acc += half_h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoidal L2 inner product of two `K x T` matrices.
pub fn inner(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let w = trapz_weights(a[0].len());
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).zip(&w).map(|((x, y), w)| w * x * y).sum::<f64>())
        .sum()
}

/// Trapezoidal L2 norm.
pub fn norm(a: &[Vec<f64>]) -> f64 {
    inner(a, a).max(0.0).sqrt()
}

/// Squared trapezoidal L2 distance.
pub fn dist_sq(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let w = trapz_weights(a[0].len());
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).zip(&w).map(|((x, y), w)| w * (x - y) * (x - y)).sum::<f64>())
        .sum()
}
