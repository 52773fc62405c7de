//! Square-root velocity representation of landscapes viewed as curves in R^K.

use serde::{Deserialize, Serialize};

use super::grid;
use crate::error::{invalid, Error, Result};
use crate::landscape::{check_matrix, Landscape, MIN_GRID};

/// Speeds at or below this multiple of the domain scale count as flat.
pub const FLAT_SPEED_RTOL: f64 = 1e-12;

/// SRVF samples `q` on the landscape grid, `K x T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SrvfRepr", into = "SrvfRepr")]
pub struct SrvfCurve {
    scale_s: f64,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SrvfRepr {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "T")]
    t: usize,
    scale_s: f64,
    values: Vec<Vec<f64>>,
}

impl TryFrom<SrvfRepr> for SrvfCurve {
    type Error = Error;

    fn try_from(r: SrvfRepr) -> Result<Self> {
        let q = SrvfCurve::new(r.values, r.scale_s)?;
        if q.k() != r.k || q.t() != r.t {
            return Err(invalid("declared shape does not match values"));
        }
        Ok(q)
    }
}

impl From<SrvfCurve> for SrvfRepr {
    fn from(q: SrvfCurve) -> Self {
        SrvfRepr { k: q.k(), t: q.t(), scale_s: q.scale_s, values: q.values }
    }
}

impl SrvfCurve {
    pub fn new(values: Vec<Vec<f64>>, scale_s: f64) -> Result<Self> {
        check_matrix(&values)?;
        if !(scale_s > 0.0 && scale_s.is_finite()) {
            return Err(invalid(format!("scale_s must be positive and finite, got {scale_s}")));
        }
        Ok(SrvfCurve { scale_s, values })
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

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        grid::norm(&self.values)
    }

    pub fn distance(&self, other: &SrvfCurve) -> f64 {
        grid::dist_sq(&self.values, &other.values).max(0.0).sqrt()
    }

    pub fn same_shape(&self, other: &SrvfCurve) -> Result<()> {
        if self.k() != other.k() || self.t() != other.t() {
            return Err(Error::DimensionMismatch(format!(
                "curves are {}x{} and {}x{}",
                self.k(),
                self.t(),
                other.k(),
                other.t()
            )));
        }
        Ok(())
    }

    /// Pointwise mean of equally shaped curves.
    pub fn mean(curves: &[SrvfCurve]) -> Result<SrvfCurve> {
        let first = curves.first().ok_or_else(|| invalid("mean of an empty sample"))?;
        let mut acc = vec![vec![0.0; first.t()]; first.k()];
        for q in curves {
            first.same_shape(q)?;
            for (a, r) in acc.iter_mut().zip(&q.values) {
                a.iter_mut().zip(r).for_each(|(x, y)| *x += y);
            }
        }
        let inv = 1.0 / curves.len() as f64;
        acc.iter_mut().flatten().for_each(|x| *x *= inv);
        SrvfCurve::new(acc, first.scale_s)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &SrvfCurve) -> SrvfCurve {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + c * y).collect())
            .collect();
        SrvfCurve { scale_s: self.scale_s, values }
    }
}

/// `q = Λ' / sqrt(|Λ'|)` with central differences; zero where the speed is flat.
pub fn srvf(l: &Landscape) -> Result<SrvfCurve> {
    if l.t() < MIN_GRID {
        return Err(invalid(format!("T must be at least {MIN_GRID}, got {}", l.t())));
    }
    let eps = FLAT_SPEED_RTOL * l.scale_s();
    let mut values: Vec<Vec<f64>> = l.values().iter().map(|r| grid::gradient(r)).collect();
    for i in 0..l.t() {
        let speed = values.iter().map(|r| r[i] * r[i]).sum::<f64>().sqrt();
        let factor = if speed <= eps { 0.0 } else { 1.0 / speed.sqrt() };
        values.iter_mut().for_each(|r| r[i] *= factor);
    }
    SrvfCurve::new(values, l.scale_s())
}

/// `Λ(t) = ∫_0^t q|q|` by the cumulative trapezoid rule.
pub fn inverse_srvf(q: &SrvfCurve, degree: usize) -> Result<Landscape> {
    let t = q.t();
    let speed: Vec<f64> = (0..t).map(|i| q.values.iter().map(|r| r[i] * r[i]).sum::<f64>().sqrt()).collect();
    let values = q
        .values
        .iter()
        .map(|r| {
            let vel: Vec<f64> = r.iter().zip(&speed).map(|(x, s)| x * s).collect();
            grid::cumtrapz(&vel)
        })
        .collect();
    Landscape::new(values, q.scale_s, degree)
}
