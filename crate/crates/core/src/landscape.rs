//! Persistence landscapes sampled on a uniform grid over [0, 1].
//!
//! A landscape built on the domain `[0, s]` is stored against the normalized
//! coordinate `t = x / s`; `scale_s` records `s`. Heights keep the units of
//! the diagram, so scaling a diagram by `alpha` scales the stored values by
//! `alpha` and leaves the grid untouched.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;
use crate::persistence::PersistenceDiagram;

/// Smallest grid accepted by the landscape builder.
pub const MIN_GRID: usize = 16;

/// Default grid size.
pub const DEFAULT_GRID: usize = 512;

/// Default headroom of the common domain over the largest death.
pub const DEFAULT_DOMAIN_PAD: f64 = 1.25;

/// Landscape levels `λ_1..λ_K` sampled at `T` uniform points of [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LandscapeRepr", into = "LandscapeRepr")]
pub struct Landscape {
    scale_s: f64,
    degree: usize,
    source_id: String,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct LandscapeRepr {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "T")]
    t: usize,
    scale_s: f64,
    degree: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    source_id: String,
    values: Vec<Vec<f64>>,
}

impl TryFrom<LandscapeRepr> for Landscape {
    type Error = Error;

    fn try_from(r: LandscapeRepr) -> Result<Self> {
        let l = Landscape::new(r.values, r.scale_s, r.degree)?.with_source_id(r.source_id);
        if l.k() != r.k || l.t() != r.t {
            return Err(invalid(format!(
                "declared shape {}x{} does not match values {}x{}",
                r.k,
                r.t,
                l.k(),
                l.t()
            )));
        }
        Ok(l)
    }
}

impl From<Landscape> for LandscapeRepr {
    fn from(l: Landscape) -> Self {
        LandscapeRepr { k: l.k(), t: l.t(), scale_s: l.scale_s, degree: l.degree, source_id: l.source_id, values: l.values }
    }
}

impl Landscape {
    /// Wraps a `K x T` matrix. Requires `K >= 1`, `T >= 2`, equal row
    /// lengths, finite values and a positive scale.
    pub fn new(values: Vec<Vec<f64>>, scale_s: f64, degree: usize) -> Result<Self> {
        check_matrix(&values)?;
        if !(scale_s > 0.0 && scale_s.is_finite()) {
            return Err(invalid(format!("scale_s must be positive and finite, got {scale_s}")));
        }
        Ok(Landscape { scale_s, degree, source_id: String::new(), values })
    }

    pub fn zeros(k: usize, t: usize, scale_s: f64, degree: usize) -> Result<Self> {
        Self::new(vec![vec![0.0; t]; k], scale_s, degree)
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn t(&self) -> usize {
        self.values[0].len()
    }

    pub fn scale_s(&self) -> f64 {
        self.scale_s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }

    /// Same metadata, new values.
    pub fn with_values(&self, values: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Landscape::new(values, self.scale_s, self.degree)?.with_source_id(self.source_id.clone()))
    }

    /// Grid index of the maximum of level `k` (first on ties).
    pub fn argmax(&self, k: usize) -> usize {
        let row = &self.values[k];
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        best
    }

    /// Largest absolute value over all levels.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Levels clamped at zero, for reporting.
    pub fn clamped(&self) -> Landscape {
        let values = self.values.iter().map(|r| r.iter().map(|v| v.max(0.0)).collect()).collect();
        Landscape { values, ..self.clone() }
    }

    /// Checks level ordering, nonnegativity, zero endpoints and the Lipschitz
    /// bound, each up to `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let t = self.t();
        let dt = 1.0 / (t - 1) as f64;
        for (k, row) in self.values.iter().enumerate() {
            if row[0].abs() > tol || row[t - 1].abs() > tol {
                return Err(Error::Numerical(format!("level {} does not vanish at the endpoints", k + 1)));
            }
            for i in 0..t {
                if row[i] < -tol {
                    return Err(Error::Numerical(format!("level {} is negative at index {i}", k + 1)));
                }
                if k + 1 < self.k() && self.values[k + 1][i] > row[i] + tol {
                    return Err(Error::Numerical(format!("level {} exceeds level {} at index {i}", k + 2, k + 1)));
                }
                if i + 1 < t && (row[i + 1] - row[i]).abs() > self.scale_s * dt * (1.0 + 1e-9) + tol {
                    return Err(Error::Numerical(format!("level {} is steeper than the domain scale at index {i}", k + 1)));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_matrix(values: &[Vec<f64>]) -> Result<()> {
    let Some(first) = values.first() else {
        return Err(invalid("need at least one level"));
    };
    if first.len() < 2 {
        return Err(invalid("need at least two grid points"));
    }
    for row in values {
        if row.len() != first.len() {
            return Err(Error::DimensionMismatch("levels have different grid sizes".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite value".into()));
        }
    }
    Ok(())
}

/// Uniform grid of `t` points on [0, 1].
pub fn unit_grid(t: usize) -> Vec<f64> {
    let h = (t - 1) as f64;
    (0..t).map(|i| i as f64 / h).collect()
}

/// Tent function of the pair `(b, d)` at `t`.
pub fn triangle_function(b: f64, d: f64, t: f64) -> Result<f64> {
    if !(b < d) {
        return Err(invalid(format!("birth {b} must be below death {d}")));
    }
    Ok(tent(b, d, t))
}

#[inline]
fn tent(b: f64, d: f64, t: f64) -> f64 {
    (t - b).min(d - t).max(0.0)
}

/// Levels `1..=k` of the landscape at `x`, written into `out`.
fn kth_maxima(pairs: &[(f64, f64)], x: f64, scratch: &mut Vec<f64>, out: &mut [f64]) {
    scratch.clear();
    scratch.extend(pairs.iter().map(|&(b, d)| tent(b, d, x)).filter(|&v| v > 0.0));
    let k = out.len();
    if scratch.len() > k {
        scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        scratch.truncate(k);
    }
    scratch.sort_unstable_by(|a, b| b.total_cmp(a));
    for (slot, v) in out.iter_mut().enumerate() {
        *v = scratch.get(slot).copied().unwrap_or(0.0);
    }
}

/// Samples the first `k` landscape levels of `dg` on `t` points of
/// `[0, domain_end]`, evaluating the tents exactly at each grid point.
pub fn landscape_from_diagram(dg: &PersistenceDiagram, k: usize, t: usize, domain_end: f64) -> Result<Landscape> {
    if k == 0 {
        return Err(invalid("K must be at least 1"));
    }
    if t < MIN_GRID {
        return Err(invalid(format!("T must be at least {MIN_GRID}, got {t}")));
    }
    if !(domain_end > 0.0 && domain_end.is_finite()) {
        return Err(invalid(format!("domain end must be positive and finite, got {domain_end}")));
    }
    let max_death = dg.max_death();
    if max_death > domain_end {
        return Err(Error::Truncation { max_death, domain_end });
    }
    let pairs = dg.pairs();
    let mut values = vec![vec![0.0; t]; k];
    let mut scratch = Vec::with_capacity(pairs.len());
    let mut column = vec![0.0; k];
    for (i, &u) in unit_grid(t).iter().enumerate() {
        kth_maxima(pairs, domain_end * u, &mut scratch, &mut column);
        for (row, &v) in values.iter_mut().zip(&column) {
            row[i] = v;
        }
    }
    Landscape::new(values, domain_end, dg.degree())
}

/// Largest number of simultaneously alive features over all diagrams, i.e.
/// the number of landscape levels that are somewhere positive. At least 1.
pub fn default_k(diagrams: &[PersistenceDiagram]) -> usize {
    diagrams.iter().map(|dg| max_overlap(dg.pairs())).max().unwrap_or(0).max(1)
}

fn max_overlap(pairs: &[(f64, f64)]) -> usize {
    // Open intervals: a death at x closes before a birth at x opens.
    let mut events: Vec<(f64, i32)> = pairs.iter().flat_map(|&(b, d)| [(b, 1), (d, -1)]).collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut depth, mut best) = (0i32, 0i32);
    for (_, step) in events {
        depth += step;
        best = best.max(depth);
    }
    best as usize
}

/// Common domain end for a sample: `pad` times the largest death.
pub fn common_domain_end(diagrams: &[PersistenceDiagram], pad: f64) -> Result<f64> {
    if !(pad >= 1.0 && pad.is_finite()) {
        return Err(invalid(format!("domain pad must be at least 1, got {pad}")));
    }
    let max_death = diagrams.iter().map(PersistenceDiagram::max_death).fold(0.0, f64::max);
    if max_death <= 0.0 {
        return Err(invalid("all diagrams are empty; no domain to build landscapes on"));
    }
    Ok(pad * max_death)
}

/// Builds every landscape on one shared domain `[0, domain_end]`.
pub fn landscapes_on_domain(diagrams: &[PersistenceDiagram], k: usize, t: usize, domain_end: f64) -> Result<Vec<Landscape>> {
    par::map(diagrams, |dg| landscape_from_diagram(dg, k, t, domain_end)).into_iter().collect()
}

/// Re-expresses landscapes over the largest domain in the sample. Levels are
/// linearly interpolated and zero beyond their original domain.
pub fn common_domain(landscapes: &[Landscape]) -> Result<Vec<Landscape>> {
    let Some(first) = landscapes.first() else {
        return Ok(Vec::new());
    };
    for l in landscapes {
        if l.degree() != first.degree() || l.t() != first.t() || l.k() != first.k() {
            return Err(Error::DimensionMismatch("landscapes differ in degree, K or T".into()));
        }
    }
    let s = landscapes.iter().map(Landscape::scale_s).fold(0.0, f64::max);
    let grid = unit_grid(first.t());
    Ok(landscapes
        .iter()
        .map(|l| {
            if l.scale_s() == s {
                return l.clone();
            }
            let ratio = s / l.scale_s();
            let values = l
                .values()
                .iter()
                .map(|row| grid.iter().map(|&u| interp_zero_beyond(row, u * ratio)).collect())
                .collect();
            Landscape { scale_s: s, degree: l.degree, source_id: l.source_id.clone(), values }
        })
        .collect())
}

fn interp_zero_beyond(row: &[f64], u: f64) -> f64 {
    if u >= 1.0 {
        return if u == 1.0 { row[row.len() - 1] } else { 0.0 };
    }
    let h = (row.len() - 1) as f64;
    let x = u * h;
    let i = x.floor() as usize;
    let w = x - i as f64;
    row[i] * (1.0 - w) + row[i + 1] * w
}

/// Pair mapped into the normalized coordinates of a domain of length `s`.
pub fn normalize_pair(pair: (f64, f64), s: f64) -> (f64, f64) {
    (pair.0 / s, pair.1 / s)
}
