//! Dynamic-programming search for the warp minimizing `‖q1 - (q2, γ)‖²`.
//!
//! Node `(i, j)` of the `T x T` lattice means `γ(t_i) = t_j`. A path moves by
//! coprime steps `(a, b)` with `a, b <= MAX_STEP` and is linear between nodes.
//! The cost of a step is the trapezoid rule over the `a + 1` grid points it
//! spans, with `q2` interpolated along the segment. Among paths whose cost
//! agrees to rounding, the one closest to the diagonal (smallest
//! `Σ |γ(t_i) - t_i|`) wins.

use super::grid::spacing;
use super::srvf::SrvfCurve;
use super::warp::Warp;
use crate::error::Result;

/// Largest step component.
pub const MAX_STEP: usize = 6;

/// Slope bound of the search; every step slope lies in `[1/SLOPE_MAX, SLOPE_MAX]`.
pub const SLOPE_MAX: f64 = 10.0;

/// Optimal lattice path.
#[derive(Debug, Clone)]
pub struct DpResult {
    pub warp: Warp,
    /// Discrete cost of the path, an approximation of `‖q1 - (q2, γ)‖²`.
    pub cost: f64,
}

struct Step {
    a: usize,
    b: usize,
    root_slope: f64,
    /// (sample `s`, whole offset in the q2 grid, fraction index, quadrature weight) for `s = 0..=a`.
    samples: Vec<(usize, usize, usize, f64)>,
    /// `b s / a - s` for `s = 1..=a`, in grid units.
    drift: Vec<f64>,
    drift_sum: f64,
}

impl Step {
    /// `Σ_s |offset + drift_s|`; closed form once every term has one sign.
    #[inline]
    fn deviation(&self, offset: f64) -> f64 {
        let n = self.a as f64;
        if offset >= MAX_STEP as f64 {
            n * offset + self.drift_sum
        } else if offset <= -(MAX_STEP as f64) {
            -(n * offset + self.drift_sum)
        } else {
            self.drift.iter().map(|v| (offset + v).abs()).sum()
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Allowed steps `(a, b)`: coprime, components at most [`MAX_STEP`], slope
/// within the bound.
pub fn steps() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=MAX_STEP {
        for b in 1..=MAX_STEP {
            let slope = b as f64 / a as f64;
            if gcd(a, b) == 1 && (1.0 / SLOPE_MAX..=SLOPE_MAX).contains(&slope) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Steps with their sample layout, and the distinct interpolation fractions.
fn build_steps(h: f64) -> (Vec<Step>, Vec<f64>) {
    let mut fractions: Vec<f64> = Vec::new();
    let mut order = steps();
    order.sort_by_key(|&(a, b)| (a + b, a));
    let steps = order
        .into_iter()
        .map(|(a, b)| {
            let samples = (0..=a)
                .map(|s| {
                    let di = (b * s) / a;
                    let w = (b * s) as f64 / a as f64 - di as f64;
                    let f = match fractions.iter().position(|&x| x == w) {
                        Some(f) => f,
                        None => {
                            fractions.push(w);
                            fractions.len() - 1
                        }
                    };
                    let quad = if s == 0 || s == a { 0.5 * h } else { h };
                    (s, di, f, quad)
                })
                .collect();
            let drift: Vec<f64> = (1..=a).map(|s| (b * s) as f64 / a as f64 - s as f64).collect();
            let drift_sum = drift.iter().sum();
            Step { a, b, root_slope: (b as f64 / a as f64).sqrt(), samples, drift, drift_sum }
        })
        .collect();
    (steps, fractions)
}

/// Feasible columns of row `i`: every node on a full path keeps the slope
/// to both corners within `[1/MAX_STEP, MAX_STEP]`.
fn column_range(i: usize, last: usize) -> (usize, usize) {
    let m = MAX_STEP;
    let ri = last - i;
    let lo = i.div_ceil(m).max(last.saturating_sub(m * ri)).max(1);
    let hi = (m * i).min(last - ri.div_ceil(m));
    (lo, hi)
}

/// Minimizes the lattice cost between `q1` and `q2` warped.
pub fn dp_align(q1: &SrvfCurve, q2: &SrvfCurve) -> Result<DpResult> {
    q1.same_shape(q2)?;
    let (k, t) = (q1.k(), q1.t());
    let h = spacing(t);
    let last = t - 1;
    let (steps, fractions) = build_steps(h);
    let scale = q1.norm().powi(2) + q2.norm().powi(2);
    let abs_tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    // Energies within this band of each other count as ties.
    let tol_at = |e: f64| abs_tol + 1e-12 * e;

    // shifted[f][c][m] = q2_c interpolated at grid position m + fractions[f].
    let shifted: Vec<Vec<Vec<f64>>> = fractions
        .iter()
        .map(|&w| {
            q2.values()
                .iter()
                .map(|row| {
                    (0..t)
                        .map(|m| {
                            let next = if m < last { row[m + 1] } else { 0.0 };
                            row[m] + w * (next - row[m])
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let x1 = q1.values();

    let mut energy = vec![f64::INFINITY; t * t];
    let mut skew = vec![f64::INFINITY; t * t];
    let mut choice = vec![u8::MAX; t * t];
    energy[0] = 0.0;
    skew[0] = 0.0;
    let mut cost = vec![0.0; t];

    for i in 1..t {
        let (lo, hi) = column_range(i, last);
        if lo > hi {
            continue;
        }
        for (si, st) in steps.iter().enumerate() {
            if st.a > i {
                continue;
            }
            let pk = i - st.a;
            let jlo = lo.max(st.b);
            if jlo > hi {
                continue;
            }
            let span = &mut cost[jlo..=hi];
            span.fill(0.0);
            for &(s, di, f, quad) in &st.samples {
                for c in 0..k {
                    let x = x1[c][pk + s];
                    let ys = &shifted[f][c][jlo - st.b + di..=hi - st.b + di];
                    for (acc, &y) in span.iter_mut().zip(ys) {
                        let d = x - st.root_slope * y;
                        *acc += quad * d * d;
                    }
                }
            }
            let row = i * t;
            let prev_row = pk * t;
            let prev = &energy[prev_row + jlo - st.b..=prev_row + hi - st.b];
            span.iter_mut().zip(prev).for_each(|(c, p)| *c += p);
            for j in jlo..=hi {
                let e = cost[j];
                let best = energy[row + j];
                if e == f64::INFINITY || e > best + tol_at(best) {
                    continue;
                }
                let pl = j - st.b;
                let d = skew[prev_row + pl] + h * st.deviation(pl as f64 - pk as f64);
                if best == f64::INFINITY || e < best - tol_at(best) || d < skew[row + j] {
                    energy[row + j] = e;
                    skew[row + j] = d;
                    choice[row + j] = si as u8;
                }
            }
        }
    }

    let mut gamma = vec![0.0; t];
    let (mut i, mut j) = (last, last);
    while i > 0 {
        let st = &steps[choice[i * t + j] as usize];
        let (pk, pl) = (i - st.a, j - st.b);
        for s in 0..=st.a {
            gamma[pk + s] = (pl as f64 + (st.b * s) as f64 / st.a as f64) / last as f64;
        }
        i = pk;
        j = pl;
    }
    gamma[0] = 0.0;
    gamma[last] = 1.0;
    let warp = Warp::new(gamma)?;
    Ok(DpResult { warp, cost: energy[last * t + last] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::unit_grid;

    fn curve(t: usize, f: impl Fn(f64) -> f64) -> SrvfCurve {
        SrvfCurve::new(vec![unit_grid(t).into_iter().map(f).collect()], 1.0).unwrap()
    }

    #[test]
    fn step_set() {
        let s = steps();
        assert_eq!(s.len(), 23);
        assert!(s.contains(&(1, 1)) && s.contains(&(5, 6)) && !s.contains(&(2, 4)));
    }

    #[test]
    fn identical_curves_give_identity() {
        let q = curve(65, |u| (7.0 * u).sin());
        let r = dp_align(&q, &q).unwrap();
        assert_eq!(r.warp, Warp::identity(65));
        assert!(r.cost < 1e-24);
    }

    #[test]
    fn zero_curves_give_identity() {
        let q = curve(40, |_| 0.0);
        assert_eq!(dp_align(&q, &q).unwrap().warp, Warp::identity(40));
    }

    #[test]
    fn shifted_bump_is_recovered() {
        let t = 129;
        let bump = |c: f64| move |u: f64| (-(u - c).powi(2) / 0.005).exp();
        let q1 = curve(t, bump(0.4));
        let q2 = curve(t, bump(0.6));
        let r = dp_align(&q1, &q2).unwrap();
        assert!((r.warp.eval(0.4) - 0.6).abs() < 0.03, "{}", r.warp.eval(0.4));
    }
}
