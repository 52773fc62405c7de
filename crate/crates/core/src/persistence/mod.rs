//! Persistence diagrams of point clouds.
//!
//! Degree 0 comes from Kruskal's algorithm on the sorted edge list. Degree 1
//! comes from a Z/2 column reduction of the coboundary matrix (the
//! anti-transpose of the boundary matrix) over edges and triangles, which
//! yields the same pairs as the boundary reduction while touching far fewer
//! columns. [`Filtration`] exposes the explicit complex and the textbook
//! boundary reduction as a second route.
//!
//! Two scale conventions are supported. Under [`Convention::Radius`] the
//! filtration parameter is the radius of the balls around each point, so an
//! edge enters at half the pairwise distance. Under [`Convention::Diameter`]
//! an edge enters at the distance itself. Pairs differ by exactly a factor 2.

mod cech;
mod cohomology;
mod filtration;
mod union_find;

use serde::{Deserialize, Serialize};

pub use cech::min_enclosing_radius;
pub use filtration::{cech2d_filtration, rips_filtration, Filtration, Simplex};
pub use union_find::UnionFind;

use crate::error::{invalid, Error, Result};
use crate::par;
use crate::simgen::PointCloud;

/// Scale convention of a filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Radius,
    Diameter,
}

impl Convention {
    /// Filtration value of an edge between points at distance `dist`.
    pub fn edge_value(self, dist: f64) -> f64 {
        match self {
            Convention::Radius => 0.5 * dist,
            Convention::Diameter => dist,
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radius" => Ok(Convention::Radius),
            "diameter" => Ok(Convention::Diameter),
            other => Err(invalid(format!("unknown convention '{other}'"))),
        }
    }
}

/// Complex used for degree-1 diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Complex {
    #[default]
    Rips,
    /// Planar Čech complex (radius convention only).
    Cech2d,
}

impl std::str::FromStr for Complex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rips" => Ok(Complex::Rips),
            "cech2d" => Ok(Complex::Cech2d),
            other => Err(invalid(format!("unknown filtration '{other}'"))),
        }
    }
}

/// Pairs whose lifetime is below this fraction of their death are treated as
/// born and killed at the same scale. Absorbs rounding in tied values.
pub const ZERO_PERSISTENCE_RTOL: f64 = 1e-11;

/// Default point cap for degree-1 computations.
pub const DEFAULT_MAX_POINTS: usize = 400;

/// A degree-tagged multiset of birth-death pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagramRepr", into = "DiagramRepr")]
pub struct PersistenceDiagram {
    degree: usize,
    convention: Convention,
    max_scale: f64,
    pairs: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    degree: usize,
    convention: Convention,
    max_scale: f64,
    pairs: Vec<[f64; 2]>,
}

impl TryFrom<DiagramRepr> for PersistenceDiagram {
    type Error = Error;

    fn try_from(r: DiagramRepr) -> Result<Self> {
        PersistenceDiagram::new(r.degree, r.convention, r.max_scale, r.pairs.into_iter().map(|[b, d]| (b, d)).collect())
    }
}

impl From<PersistenceDiagram> for DiagramRepr {
    fn from(d: PersistenceDiagram) -> Self {
        DiagramRepr {
            degree: d.degree,
            convention: d.convention,
            max_scale: d.max_scale,
            pairs: d.pairs.into_iter().map(|(b, d)| [b, d]).collect(),
        }
    }
}

fn is_zero_persistence(b: f64, d: f64) -> bool {
    d - b <= ZERO_PERSISTENCE_RTOL * d.abs()
}

impl PersistenceDiagram {
    /// Builds a diagram, dropping zero-persistence pairs and sorting the rest
    /// by birth, then death. Fails if a pair is outside `0 <= b < d <= max_scale`.
    pub fn new(degree: usize, convention: Convention, max_scale: f64, pairs: Vec<(f64, f64)>) -> Result<Self> {
        if !(max_scale > 0.0 && max_scale.is_finite()) {
            return Err(invalid(format!("max_scale must be positive and finite, got {max_scale}")));
        }
        let mut kept = Vec::with_capacity(pairs.len());
        for (b, d) in pairs {
            if !(b >= 0.0 && d >= b && d <= max_scale) {
                return Err(invalid(format!("pair ({b}, {d}) violates 0 <= b <= d <= {max_scale}")));
            }
            if !is_zero_persistence(b, d) {
                kept.push((b, d));
            }
        }
        kept.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        Ok(PersistenceDiagram { degree, convention, max_scale, pairs: kept })
    }

    pub fn empty(degree: usize, convention: Convention, max_scale: f64) -> Result<Self> {
        Self::new(degree, convention, max_scale, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Largest death, or 0 for an empty diagram.
    pub fn max_death(&self) -> f64 {
        self.pairs.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// Indices of the pairs ordered by decreasing persistence. Ties go to the
    /// earlier birth, then the earlier death.
    pub fn persistence_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.pairs.len()).collect();
        idx.sort_by(|&a, &b| {
            let (pa, pb) = (self.pairs[a], self.pairs[b]);
            (pb.1 - pb.0)
                .total_cmp(&(pa.1 - pa.0))
                .then(pa.0.total_cmp(&pb.0))
                .then(pa.1.total_cmp(&pb.1))
        });
        idx
    }

    /// Keeps only the `j` most persistent pairs.
    pub fn top_j(&self, j: usize) -> PersistenceDiagram {
        let order = self.persistence_order();
        let pairs = order.into_iter().take(j).map(|i| self.pairs[i]).collect();
        PersistenceDiagram::new(self.degree, self.convention, self.max_scale, pairs)
            .expect("subset of a valid diagram is valid")
    }

    /// Drops pairs with persistence `d - b` below `threshold`.
    pub fn filter_persistence(&self, threshold: f64) -> PersistenceDiagram {
        let pairs = self.pairs.iter().copied().filter(|(b, d)| d - b >= threshold).collect();
        PersistenceDiagram::new(self.degree, self.convention, self.max_scale, pairs)
            .expect("subset of a valid diagram is valid")
    }

    /// Multiplies every pair and the scale bound by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<PersistenceDiagram> {
        if !(alpha > 0.0) {
            return Err(invalid("scale factor must be positive"));
        }
        let pairs = self.pairs.iter().map(|&(b, d)| (alpha * b, alpha * d)).collect();
        PersistenceDiagram::new(self.degree, self.convention, alpha * self.max_scale, pairs)
    }
}

/// Options shared by the diagram computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhOptions {
    pub convention: Convention,
    /// Filtration truncation; `None` runs the full filtration.
    pub max_scale: Option<f64>,
    /// Report essential classes as pairs dying at `max_scale` instead of dropping them.
    pub cap_essential: bool,
    /// Degree-1 point cap.
    pub max_points: usize,
}

impl Default for PhOptions {
    fn default() -> Self {
        PhOptions { convention: Convention::Radius, max_scale: None, cap_essential: false, max_points: DEFAULT_MAX_POINTS }
    }
}

/// Pairwise Euclidean distances, row-major `n x n`.
pub fn distance_matrix(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.len();
    let pts = cloud.points();
    let rows = par::map_range(n, |i| {
        let pi = &pts[i];
        (0..n)
            .map(|j| pi.iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .collect::<Vec<f64>>()
    });
    rows.concat()
}

/// Edges `(value, i, j)` with `i < j` and `value <= max_scale`, sorted by
/// value then vertex pair.
pub(crate) fn sorted_edges(edge_values: &[f64], n: usize, max_scale: f64) -> Vec<(f64, u32, u32)> {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = edge_values[i * n + j];
            if v <= max_scale {
                edges.push((v, i as u32, j as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    edges
}

fn edge_values(cloud: &PointCloud, convention: Convention) -> Vec<f64> {
    let mut values = distance_matrix(cloud);
    for v in values.iter_mut() {
        *v = convention.edge_value(*v);
    }
    values
}

/// `min_v max_u value(v, u)`. From this scale on the complex is a cone over
/// the minimizing vertex, so every degree-1 class has died.
fn enclosing_value(values: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|v| values[v * n..(v + 1) * n].iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn resolve_max_scale(requested: Option<f64>, full: f64) -> Result<(f64, f64)> {
    // (truncation used in the computation, scale recorded in the diagram)
    match requested {
        Some(s) if s > 0.0 && s.is_finite() => Ok((s, s)),
        Some(s) => Err(invalid(format!("max_scale must be positive and finite, got {s}"))),
        None => Ok((f64::INFINITY, full.max(f64::MIN_POSITIVE))),
    }
}

/// Degree-0 diagram by Kruskal's algorithm: each merge at edge value `e`
/// emits `(0, e)`. These are the single-linkage merge heights.
pub fn persistence_deg0(cloud: &PointCloud, opts: &PhOptions) -> Result<PersistenceDiagram> {
    let n = cloud.len();
    let values = edge_values(cloud, opts.convention);
    let full = values.iter().copied().fold(0.0, f64::max);
    let (trunc, recorded) = resolve_max_scale(opts.max_scale, full)?;
    let edges = sorted_edges(&values, n, trunc);
    let mut uf = UnionFind::new(n);
    let mut pairs = Vec::with_capacity(n);
    for &(v, i, j) in &edges {
        if uf.union(i as usize, j as usize) {
            pairs.push((0.0, v));
            if pairs.len() + 1 == n {
                break;
            }
        }
    }
    if opts.cap_essential {
        let components = n - pairs.len();
        pairs.extend(std::iter::repeat_n((0.0, recorded), components));
    }
    PersistenceDiagram::new(0, opts.convention, recorded, pairs)
}

/// Degree-1 Vietoris-Rips diagram.
pub fn persistence_deg1_rips(cloud: &PointCloud, opts: &PhOptions) -> Result<PersistenceDiagram> {
    let n = cloud.len();
    if n > opts.max_points {
        return Err(Error::TooManyPoints { n, cap: opts.max_points });
    }
    let values = edge_values(cloud, opts.convention);
    let full = values.iter().copied().fold(0.0, f64::max);
    let (trunc, recorded) = resolve_max_scale(opts.max_scale, full)?;
    let tri = |i: usize, j: usize, k: usize| values[i * n + j].max(values[i * n + k]).max(values[j * n + k]);
    let trunc = trunc.min(enclosing_value(&values, n));
    let (finite, essential) = cohomology::degree1_pairs(n, &values, tri, trunc);
    finish_deg1(opts, recorded, finite, essential)
}

/// Degree-1 planar Čech diagram (radius convention). A triangle enters at the
/// radius of its minimum enclosing circle.
pub fn persistence_deg1_cech2d(cloud: &PointCloud, opts: &PhOptions) -> Result<PersistenceDiagram> {
    if cloud.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("cech2d needs planar points, got dimension {}", cloud.dim())));
    }
    if opts.convention != Convention::Radius {
        return Err(invalid("cech2d supports the radius convention only"));
    }
    let n = cloud.len();
    if n > opts.max_points {
        return Err(Error::TooManyPoints { n, cap: opts.max_points });
    }
    let values = edge_values(cloud, Convention::Radius);
    // A triangle's enclosing radius is at most its longest side over sqrt(3).
    let full = values.iter().copied().fold(0.0, f64::max) * 2.0 / 3f64.sqrt();
    let (trunc, recorded) = resolve_max_scale(opts.max_scale, full)?;
    let pts: Vec<[f64; 2]> = cloud.points().iter().map(|p| [p[0], p[1]]).collect();
    let tri = |i: usize, j: usize, k: usize| min_enclosing_radius(pts[i], pts[j], pts[k]);
    // A ball of radius |v - u| around v covers every u, so the cone forms at twice the edge value.
    let trunc = trunc.min(2.0 * enclosing_value(&values, n));
    let (finite, essential) = cohomology::degree1_pairs(n, &values, tri, trunc);
    finish_deg1(opts, recorded, finite, essential)
}

fn finish_deg1(opts: &PhOptions, recorded: f64, mut finite: Vec<(f64, f64)>, essential: Vec<f64>) -> Result<PersistenceDiagram> {
    if opts.cap_essential {
        finite.extend(essential.into_iter().filter(|&b| b < recorded).map(|b| (b, recorded)));
    }
    PersistenceDiagram::new(1, opts.convention, recorded, finite)
}

/// Dispatches on degree and complex.
pub fn diagram(cloud: &PointCloud, degree: usize, complex: Complex, opts: &PhOptions) -> Result<PersistenceDiagram> {
    match (degree, complex) {
        (0, _) => persistence_deg0(cloud, opts),
        (1, Complex::Rips) => persistence_deg1_rips(cloud, opts),
        (1, Complex::Cech2d) => persistence_deg1_cech2d(cloud, opts),
        (d, _) => Err(invalid(format!("degree {d} is not supported (0 or 1)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cloud(points: &[&[f64]]) -> PointCloud {
        PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn ngon(n: usize, r: f64) -> PointCloud {
        PointCloud::new((0..n).map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            vec![r * a.cos(), r * a.sin()]
        }).collect()).unwrap()
    }

    #[test]
    fn single_point_has_empty_deg0() {
        let d = persistence_deg0(&cloud(&[&[1.0, 2.0]]), &PhOptions::default()).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn collinear_deg0_by_hand() {
        let d = persistence_deg0(&cloud(&[&[0.0], &[1.0], &[3.0]]), &PhOptions::default()).unwrap();
        assert_eq!(d.pairs(), &[(0.0, 0.5), (0.0, 1.0)]);
        let capped = persistence_deg0(
            &cloud(&[&[0.0], &[1.0], &[3.0]]),
            &PhOptions { cap_essential: true, max_scale: Some(2.0), ..Default::default() },
        )
        .unwrap();
        assert_eq!(capped.pairs(), &[(0.0, 0.5), (0.0, 1.0), (0.0, 2.0)]);
    }

    #[test]
    fn equilateral_triangle_has_no_rips_loop() {
        let h = 3f64.sqrt() / 2.0;
        let d = persistence_deg1_rips(&cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]), &PhOptions::default()).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn unit_square_rips_loop() {
        let sq = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let d = persistence_deg1_rips(&sq, &PhOptions::default()).unwrap();
        assert_eq!(d.len(), 1);
        let (b, de) = d.pairs()[0];
        assert!((b - 0.5).abs() < 1e-15 && (de - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn decagon_rips_birth_and_death() {
        let d = persistence_deg1_rips(&ngon(10, 1.0), &PhOptions::default()).unwrap();
        assert_eq!(d.len(), 1);
        let (b, de) = d.pairs()[0];
        assert!((b - (PI / 10.0).sin()).abs() < 1e-12);
        assert!((de - (2.0 * PI / 5.0).sin()).abs() < 1e-12);
        let dd = persistence_deg1_rips(&ngon(10, 1.0), &PhOptions { convention: Convention::Diameter, ..Default::default() }).unwrap();
        assert_eq!(dd.pairs()[0], (2.0 * b, 2.0 * de));
    }

    #[test]
    fn decagon_cech_pairs() {
        for (r, b, de) in [(0.5, 0.154508, 0.5), (1.0, 0.309017, 1.0)] {
            let d = persistence_deg1_cech2d(&ngon(10, r), &PhOptions::default()).unwrap();
            assert_eq!(d.len(), 1, "{:?}", d.pairs());
            assert!((d.pairs()[0].0 - b).abs() < 1e-6 && (d.pairs()[0].1 - de).abs() < 1e-6);
        }
    }

    #[test]
    fn equilateral_cech_loop() {
        let h = 3f64.sqrt() / 2.0;
        let d = persistence_deg1_cech2d(&cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]), &PhOptions::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.pairs()[0].0 - 0.5).abs() < 1e-15);
        assert!((d.pairs()[0].1 - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cech_rejects_non_planar_and_diameter() {
        let c3 = cloud(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]);
        assert!(matches!(persistence_deg1_cech2d(&c3, &PhOptions::default()), Err(Error::DimensionMismatch(_))));
        let c2 = ngon(5, 1.0);
        assert!(persistence_deg1_cech2d(&c2, &PhOptions { convention: Convention::Diameter, ..Default::default() }).is_err());
    }

    #[test]
    fn point_cap_is_enforced() {
        let c = ngon(30, 1.0);
        let err = persistence_deg1_rips(&c, &PhOptions { max_points: 20, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::TooManyPoints { n: 30, cap: 20 }));
    }

    #[test]
    fn truncation_keeps_or_caps_essential_loops() {
        let c = ngon(10, 1.0);
        let cut = PhOptions { max_scale: Some(0.5), ..Default::default() };
        assert!(persistence_deg1_rips(&c, &cut).unwrap().is_empty());
        let capped = persistence_deg1_rips(&c, &PhOptions { cap_essential: true, ..cut }).unwrap();
        assert_eq!(capped.len(), 1);
        assert_eq!(capped.pairs()[0].1, 0.5);
        assert_eq!(capped.max_scale(), 0.5);
    }

    #[test]
    fn diagram_invariants_and_json() {
        assert!(PersistenceDiagram::new(1, Convention::Radius, 1.0, vec![(0.5, 0.2)]).is_err());
        assert!(PersistenceDiagram::new(1, Convention::Radius, 1.0, vec![(0.5, 1.5)]).is_err());
        let d = PersistenceDiagram::new(1, Convention::Radius, 2.0, vec![(0.3, 1.0), (0.1, 0.1), (0.2, 0.9)]).unwrap();
        assert_eq!(d.pairs(), &[(0.2, 0.9), (0.3, 1.0)]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"degree":1,"convention":"radius","max_scale":2.0,"pairs":[[0.2,0.9],[0.3,1.0]]}"#);
        let back: PersistenceDiagram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn top_j_ranks_by_persistence() {
        let d = PersistenceDiagram::new(1, Convention::Radius, 2.0, vec![(0.1, 0.2), (0.3, 1.0), (0.2, 0.6)]).unwrap();
        assert_eq!(d.top_j(2).pairs(), &[(0.2, 0.6), (0.3, 1.0)]);
        assert_eq!(d.top_j(5).len(), 3);
        assert_eq!(d.filter_persistence(0.2).len(), 2);
    }
}
