//! Explicit simplicial filtrations and the standard boundary reduction.

use std::collections::HashMap;

use super::{distance_matrix, min_enclosing_radius, Convention, PersistenceDiagram, ZERO_PERSISTENCE_RTOL};
use crate::error::{invalid, Error, Result};
use crate::simgen::PointCloud;

/// A simplex with sorted vertices and its filtration value.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces in vertex-removal order.
    pub fn faces(&self) -> Vec<Vec<u32>> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| self.vertices.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect())
            .collect()
    }
}

/// Simplices sorted by value, then dimension, then vertex list.
#[derive(Debug, Clone)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    convention: Convention,
    max_scale: f64,
}

impl Filtration {
    pub fn new(mut simplices: Vec<Simplex>, convention: Convention, max_scale: f64) -> Self {
        for s in simplices.iter_mut() {
            s.vertices.sort_unstable();
        }
        simplices.sort_by(|a, b| {
            a.value.total_cmp(&b.value).then(a.dim().cmp(&b.dim())).then_with(|| a.vertices.cmp(&b.vertices))
        });
        Filtration { simplices, convention, max_scale }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    /// Checks that every face is present, enters no later than its coface and
    /// precedes it in the order.
    pub fn check_filtration_property(&self) -> Result<()> {
        let index = self.index();
        for (pos, s) in self.simplices.iter().enumerate() {
            for face in s.faces() {
                let Some(&fpos) = index.get(&face) else {
                    return Err(invalid(format!("face {face:?} of {:?} is missing", s.vertices)));
                };
                if self.simplices[fpos].value > s.value || fpos >= pos {
                    return Err(invalid(format!("face {face:?} enters after {:?}", s.vertices)));
                }
            }
        }
        Ok(())
    }

    fn index(&self) -> HashMap<Vec<u32>, usize> {
        self.simplices.iter().enumerate().map(|(k, s)| (s.vertices.clone(), k)).collect()
    }

    /// Z/2 reduction of the boundary matrix. Returns finite pairs and the
    /// births of essential classes, per degree.
    pub fn reduce(&self) -> Reduction {
        let index = self.index();
        let m = self.simplices.len();
        let mut columns: Vec<Vec<usize>> = self
            .simplices
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = s.faces().iter().map(|f| index[f]).collect();
                col.sort_unstable();
                col
            })
            .collect();
        let mut low_owner: HashMap<usize, usize> = HashMap::new();
        let mut paired = vec![false; m];
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for j in 0..m {
            while let Some(&low) = columns[j].last() {
                match low_owner.get(&low) {
                    Some(&k) => {
                        let other = std::mem::take(&mut columns[k]);
                        columns[j] = symmetric_difference(&columns[j], &other);
                        columns[k] = other;
                    }
                    None => {
                        low_owner.insert(low, j);
                        paired[low] = true;
                        paired[j] = true;
                        pairs.push((low, j));
                        break;
                    }
                }
            }
        }
        let top = self.simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        let mut finite = vec![Vec::new(); top + 1];
        let mut essential = vec![Vec::new(); top + 1];
        for (b, d) in pairs {
            let (sb, sd) = (&self.simplices[b], &self.simplices[d]);
            finite[sb.dim()].push((sb.value, sd.value));
        }
        for (k, s) in self.simplices.iter().enumerate() {
            if !paired[k] {
                essential[s.dim()].push(s.value);
            }
        }
        Reduction { finite, essential, top_dim: top }
    }

    /// Diagram of the given degree from the boundary reduction.
    pub fn diagram(&self, degree: usize) -> Result<PersistenceDiagram> {
        let red = self.reduce();
        if degree >= red.top_dim {
            return Err(invalid(format!("degree {degree} needs simplices of dimension {}", degree + 1)));
        }
        let pairs = red.finite[degree]
            .iter()
            .copied()
            .filter(|&(b, d)| d - b > ZERO_PERSISTENCE_RTOL * d.abs())
            .collect();
        PersistenceDiagram::new(degree, self.convention, self.max_scale, pairs)
    }
}

/// Output of [`Filtration::reduce`], indexed by degree.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub finite: Vec<Vec<(f64, f64)>>,
    pub essential: Vec<Vec<f64>>,
    pub top_dim: usize,
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        if a[x] < b[y] {
            out.push(a[x]);
            x += 1;
        } else if a[x] > b[y] {
            out.push(b[y]);
            y += 1;
        } else {
            x += 1;
            y += 1;
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

fn clique_filtration<F>(n: usize, edge: &[f64], tri: F, max_dim: usize, max_scale: f64, convention: Convention) -> Filtration
where
    F: Fn(usize, usize, usize) -> f64,
{
    let mut simplices: Vec<Simplex> = (0..n as u32).map(|v| Simplex { vertices: vec![v], value: 0.0 }).collect();
    for i in 0..n {
        for j in i + 1..n {
            let v = edge[i * n + j];
            if v <= max_scale {
                simplices.push(Simplex { vertices: vec![i as u32, j as u32], value: v });
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = tri(i, j, k);
                    if v <= max_scale {
                        simplices.push(Simplex { vertices: vec![i as u32, j as u32, k as u32], value: v });
                    }
                }
            }
        }
    }
    Filtration::new(simplices, convention, max_scale)
}

fn recorded_scale(max_scale: Option<f64>, full: f64) -> Result<(f64, f64)> {
    match max_scale {
        Some(s) if s > 0.0 && s.is_finite() => Ok((s, s)),
        Some(s) => Err(invalid(format!("max_scale must be positive and finite, got {s}"))),
        None => Ok((f64::INFINITY, full.max(f64::MIN_POSITIVE))),
    }
}

/// Vietoris-Rips filtration up to dimension `max_dim` (1 or 2).
pub fn rips_filtration(cloud: &PointCloud, max_dim: usize, max_scale: Option<f64>, convention: Convention) -> Result<Filtration> {
    if !(1..=2).contains(&max_dim) {
        return Err(invalid(format!("max_dim must be 1 or 2, got {max_dim}")));
    }
    let n = cloud.len();
    let mut edge = distance_matrix(cloud);
    edge.iter_mut().for_each(|v| *v = convention.edge_value(*v));
    let full = edge.iter().copied().fold(0.0, f64::max);
    let (trunc, recorded) = recorded_scale(max_scale, full)?;
    let tri = |i: usize, j: usize, k: usize| edge[i * n + j].max(edge[i * n + k]).max(edge[j * n + k]);
    let mut f = clique_filtration(n, &edge, tri, max_dim, trunc, convention);
    f.max_scale = recorded;
    Ok(f)
}

/// Planar Čech filtration in the radius convention, up to triangles.
pub fn cech2d_filtration(cloud: &PointCloud, max_scale: Option<f64>) -> Result<Filtration> {
    if cloud.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("cech2d needs planar points, got dimension {}", cloud.dim())));
    }
    let n = cloud.len();
    let mut edge = distance_matrix(cloud);
    edge.iter_mut().for_each(|v| *v *= 0.5);
    let full = edge.iter().copied().fold(0.0, f64::max) * 2.0 / 3f64.sqrt();
    let (trunc, recorded) = recorded_scale(max_scale, full)?;
    let pts: Vec<[f64; 2]> = cloud.points().iter().map(|p| [p[0], p[1]]).collect();
    let tri = |i: usize, j: usize, k: usize| min_enclosing_radius(pts[i], pts[j], pts[k]);
    let mut f = clique_filtration(n, &edge, tri, 2, trunc, Convention::Radius);
    f.max_scale = recorded;
    Ok(f)
}
