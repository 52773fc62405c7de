//! Orientation-preserving reparameterizations of [0, 1] sampled on the grid.

use serde::{Deserialize, Serialize};

use super::grid;
use super::srvf::SrvfCurve;
use crate::error::{invalid, Error, Result};
use crate::landscape::{unit_grid, Landscape};

/// Strictly increasing grid samples of a warp with `γ(0) = 0`, `γ(1) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WarpRepr", into = "WarpRepr")]
pub struct Warp {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WarpRepr {
    #[serde(rename = "T")]
    t: usize,
    values: Vec<f64>,
}

impl TryFrom<WarpRepr> for Warp {
    type Error = Error;

    fn try_from(r: WarpRepr) -> Result<Self> {
        if r.values.len() != r.t {
            return Err(invalid(format!("declared T = {} but {} values", r.t, r.values.len())));
        }
        Warp::new(r.values)
    }
}

impl From<Warp> for WarpRepr {
    fn from(w: Warp) -> Self {
        WarpRepr { t: w.values.len(), values: w.values }
    }
}

impl Warp {
    /// Validates pinned endpoints and strict monotonicity.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("a warp needs at least two grid points"));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 1.0 {
            return Err(invalid("a warp must map 0 to 0 and 1 to 1"));
        }
        if let Some(index) = values.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneWarp { index });
        }
        Ok(Warp { values })
    }

    pub fn identity(t: usize) -> Self {
        Warp { values: unit_grid(t) }
    }

    pub fn t(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `γ(u)` by linear interpolation.
    pub fn eval(&self, u: f64) -> f64 {
        grid::interp(&self.values, u)
    }

    /// `γ⁻¹(x)` of the piecewise-linear warp.
    pub fn inverse_at(&self, x: f64) -> f64 {
        let v = &self.values;
        let last = v.len() - 1;
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let j = v.partition_point(|&g| g <= x).clamp(1, last);
        let w = (x - v[j - 1]) / (v[j] - v[j - 1]);
        ((j - 1) as f64 + w) / last as f64
    }

    /// Sup-norm distance to the identity.
    pub fn deviation_from_identity(&self) -> f64 {
        unit_grid(self.t()).iter().zip(&self.values).map(|(u, g)| (u - g).abs()).fold(0.0, f64::max)
    }

    /// Pointwise mean of equally sized warps.
    pub fn mean(warps: &[Warp]) -> Result<Warp> {
        let first = warps.first().ok_or_else(|| invalid("mean of no warps"))?;
        let t = first.t();
        let mut acc = vec![0.0; t];
        for w in warps {
            same_grid(first, w)?;
            acc.iter_mut().zip(&w.values).for_each(|(a, g)| *a += g);
        }
        let n = warps.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc[0] = 0.0;
        acc[t - 1] = 1.0;
        Warp::new(acc)
    }
}

fn same_grid(a: &Warp, b: &Warp) -> Result<()> {
    if a.t() != b.t() {
        return Err(Error::DimensionMismatch(format!("warps have {} and {} points", a.t(), b.t())));
    }
    Ok(())
}

/// Builds a warp from arbitrary samples, repairing endpoints. Fails if the
/// samples are not strictly increasing.
pub fn warp_from_samples(mut values: Vec<f64>) -> Result<Warp> {
    let last = values.len().saturating_sub(1);
    if last >= 1 {
        values[0] = 0.0;
        values[last] = 1.0;
    }
    Warp::new(values)
}

/// Grid inverse by monotone linear interpolation.
pub fn invert_warp(g: &Warp) -> Warp {
    let t = g.t();
    let mut values: Vec<f64> = unit_grid(t).into_iter().map(|x| g.inverse_at(x)).collect();
    values[0] = 0.0;
    values[t - 1] = 1.0;
    Warp::new(values).expect("inverse of a strictly increasing warp is strictly increasing")
}

/// `(γ₁ ∘ γ₂)(t) = γ₁(γ₂(t))` on the grid.
pub fn compose_warps(g1: &Warp, g2: &Warp) -> Result<Warp> {
    same_grid(g1, g2)?;
    let t = g1.t();
    let mut values: Vec<f64> = g2.values.iter().map(|&u| g1.eval(u)).collect();
    values[0] = 0.0;
    values[t - 1] = 1.0;
    Warp::new(values)
}

/// `(q, γ) = q(γ) sqrt(γ')` with central-difference `γ'`.
pub fn warp_action(q: &SrvfCurve, g: &Warp) -> Result<SrvfCurve> {
    if q.t() != g.t() {
        return Err(Error::DimensionMismatch(format!("curve has {} points, warp {}", q.t(), g.t())));
    }
    let root: Vec<f64> = grid::gradient(&g.values).into_iter().map(|d| d.max(0.0).sqrt()).collect();
    let values = q
        .values()
        .iter()
        .map(|r| g.values.iter().zip(&root).map(|(&u, &s)| grid::interp(r, u) * s).collect())
        .collect();
    SrvfCurve::new(values, q.scale_s())
}

/// `Λ ∘ γ`, level by level.
pub fn compose_landscape(l: &Landscape, g: &Warp) -> Result<Landscape> {
    if l.t() != g.t() {
        return Err(Error::DimensionMismatch(format!("landscape has {} points, warp {}", l.t(), g.t())));
    }
    let values = l.values().iter().map(|r| g.values.iter().map(|&u| grid::interp(r, u)).collect()).collect();
    l.with_values(values)
}
