//! Seeded point-cloud generators for the simulation designs.
//!
//! Every cloud is drawn from its own ChaCha8 stream: the generator is seeded
//! with `SimConfig::seed` and `set_stream(index)` selects the cloud. Cloud `i`
//! is therefore the same whether it is generated alone, sequentially, or in
//! parallel with the others.
//!
//! Draw order inside a stream is fixed: sample size, radii / proportions /
//! revolutions, positions, then additive noise. Noise is drawn after all
//! positions, so a noisy cloud equals its noiseless twin plus noise.

use std::f64::consts::{PI, TAU};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::par;

/// A finite set of points in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointCloudRepr", into = "PointCloudRepr")]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct PointCloudRepr {
    dim: usize,
    label: Option<String>,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PointCloudRepr> for PointCloud {
    type Error = crate::Error;

    fn try_from(r: PointCloudRepr) -> Result<Self> {
        let mut cloud = PointCloud::new(r.points)?;
        if cloud.dim != r.dim {
            return Err(invalid(format!(
                "declared dim {} does not match points of dim {}",
                r.dim, cloud.dim
            )));
        }
        cloud.label = r.label;
        Ok(cloud)
    }
}

impl From<PointCloud> for PointCloudRepr {
    fn from(c: PointCloud) -> Self {
        PointCloudRepr { dim: c.dim, label: c.label, points: c.points }
    }
}

impl PointCloud {
    /// Builds a cloud, checking that it is non-empty, finite and of uniform dimension.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| invalid("point cloud is empty"))?;
        if dim == 0 {
            return Err(invalid("points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(invalid(format!("point {i} has dimension {}, expected {dim}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(invalid(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(PointCloud { dim, points, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Multiplies every coordinate by `alpha`.
    pub fn scaled(&self, alpha: f64) -> PointCloud {
        PointCloud {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|x| x * alpha).collect()).collect(),
            label: self.label.clone(),
        }
    }

    /// Seeded subsample of `n` distinct points, kept in original order.
    /// Returns a clone when the cloud already has at most `n` points.
    pub fn subsample(&self, n: usize, seed: u64) -> PointCloud {
        if n >= self.points.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, self.points.len(), n).into_vec();
        picked.sort_unstable();
        PointCloud {
            dim: self.dim,
            points: picked.into_iter().map(|i| self.points[i].clone()).collect(),
            label: self.label.clone(),
        }
    }

    /// Points flattened row-major.
    pub fn flat(&self) -> Vec<f64> {
        self.points.iter().flatten().copied().collect()
    }
}

/// Simulation design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    Circle,
    TwoCircles,
    Spirals,
    Torus,
}

impl Design {
    pub fn name(self) -> &'static str {
        match self {
            Design::Circle => "circle",
            Design::TwoCircles => "two-circles",
            Design::Spirals => "spirals",
            Design::Torus => "torus",
        }
    }
}

impl std::str::FromStr for Design {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Design::Circle),
            "two-circles" => Ok(Design::TwoCircles),
            "spirals" => Ok(Design::Spirals),
            "torus" => Ok(Design::Torus),
            other => Err(invalid(format!("unknown design '{other}'"))),
        }
    }
}

/// Parameters of one simulation design.
///
/// `size_range` is the total number of points per cloud, drawn
/// discrete-uniformly from the inclusive range. Radii are drawn as
/// `|N(radius_mean, radius_sd^2)|`; for the torus these describe the major
/// radius. Proportions (small circle / large circle, minor / major radius)
/// are `Beta(10, 10)` unless `proportion` pins them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub design: Design,
    pub seed: u64,
    pub n_clouds: usize,
    pub noise_sigma_factor: f64,
    pub size_range: (usize, usize),
    pub radius_mean: f64,
    pub radius_sd: f64,
    /// Spiral revolution count range, drawn uniformly.
    pub revolutions: (f64, f64),
    /// Pins the Beta(10, 10) proportion.
    pub proportion: Option<f64>,
    /// Equally spaced angles instead of uniform random ones (circle designs).
    pub equispaced: bool,
    /// Explicit radius for cloud `i` (cycled), replacing the radius draw.
    pub fixed_radii: Option<Vec<f64>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::for_design(Design::Circle)
    }
}

impl SimConfig {
    /// Defaults for each design: circles M ~ DU(10, 30) and r ~ |N(1, 0.3^2)|;
    /// two circles M ~ DU(20, 30); spirals 2000 points with Uniform(2, 5)
    /// revolutions; torus 1000 points with major radius |N(2, 0.3^2)|.
    pub fn for_design(design: Design) -> Self {
        let base = SimConfig {
            design,
            seed: 0,
            n_clouds: 20,
            noise_sigma_factor: 0.0,
            size_range: (10, 30),
            radius_mean: 1.0,
            radius_sd: 0.3,
            revolutions: (2.0, 5.0),
            proportion: None,
            equispaced: false,
            fixed_radii: None,
        };
        match design {
            Design::Circle => base,
            Design::TwoCircles => SimConfig { size_range: (20, 30), ..base },
            Design::Spirals => SimConfig { size_range: (2000, 2000), ..base },
            Design::Torus => SimConfig { size_range: (1000, 1000), radius_mean: 2.0, ..base },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.size_range;
        if lo == 0 || lo > hi {
            return Err(invalid(format!("size_range ({lo}, {hi}) must be a nonempty range of positive sizes")));
        }
        if !(self.radius_sd >= 0.0) || !self.radius_mean.is_finite() {
            return Err(invalid("radius_sd must be >= 0 and radius_mean finite"));
        }
        if !(self.noise_sigma_factor >= 0.0) {
            return Err(invalid("noise_sigma_factor must be >= 0"));
        }
        let (ulo, uhi) = self.revolutions;
        if !(ulo > 0.0 && ulo <= uhi) {
            return Err(invalid("revolutions must be a positive interval"));
        }
        if let Some(p) = self.proportion {
            if !(p > 0.0 && p <= 1.0) {
                return Err(invalid(format!("proportion {p} must lie in (0, 1]")));
            }
        }
        if let Some(radii) = &self.fixed_radii {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
                return Err(invalid("fixed_radii must be a nonempty list of positive radii"));
            }
        }
        if self.design == Design::TwoCircles && lo < 2 {
            return Err(invalid("two circles need at least 2 points"));
        }
        Ok(())
    }
}

/// Random stream for cloud `index`.
pub fn cloud_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generates `config.n_clouds` clouds, cloud `i` from stream `i`.
pub fn generate(config: &SimConfig) -> Result<Vec<PointCloud>> {
    config.validate()?;
    par::map_range(config.n_clouds, |i| sample_cloud(config, i)).into_iter().collect()
}

/// Concatenated samples of several designs. Cloud `i` of the output uses
/// stream `i` of its part's seed, so no two clouds share a stream.
pub fn generate_mixture(parts: &[SimConfig]) -> Result<Vec<PointCloud>> {
    let mut jobs = Vec::new();
    for part in parts {
        part.validate()?;
        jobs.extend((0..part.n_clouds).map(|_| part));
    }
    par::map_range(jobs.len(), |i| sample_cloud(jobs[i], i)).into_iter().collect()
}

/// Generates cloud `index` of the design in `config`.
pub fn sample_cloud(config: &SimConfig, index: usize) -> Result<PointCloud> {
    config.validate()?;
    let mut rng = cloud_rng(config.seed, index);
    let fixed = config.fixed_radii.as_ref().map(|r| r[index % r.len()]);
    let points = match config.design {
        Design::Circle => circle_points(config, fixed, &mut rng),
        Design::TwoCircles => two_circle_points(config, fixed, &mut rng),
        Design::Spirals => spiral_points(config, &mut rng),
        Design::Torus => torus_points(config, fixed, &mut rng),
    };
    Ok(PointCloud::new(points)?.with_label(config.design.name()))
}

/// Circle design. Panics if `config.design` is not [`Design::Circle`].
pub fn sample_circle(config: &SimConfig, index: usize) -> Result<PointCloud> {
    assert_eq!(config.design, Design::Circle, "sample_circle needs a circle config");
    sample_cloud(config, index)
}

/// Two externally tangent circles. Panics on a different design.
pub fn sample_two_circles(config: &SimConfig, index: usize) -> Result<PointCloud> {
    assert_eq!(config.design, Design::TwoCircles, "sample_two_circles needs a two-circles config");
    sample_cloud(config, index)
}

/// Two interwoven Archimedean spirals. Panics on a different design.
pub fn sample_spirals(config: &SimConfig, index: usize) -> Result<PointCloud> {
    assert_eq!(config.design, Design::Spirals, "sample_spirals needs a spirals config");
    sample_cloud(config, index)
}

/// Area-uniform ring torus in R^3. Panics on a different design.
pub fn sample_torus(config: &SimConfig, index: usize) -> Result<PointCloud> {
    assert_eq!(config.design, Design::Torus, "sample_torus needs a torus config");
    sample_cloud(config, index)
}

fn draw_size(config: &SimConfig, rng: &mut ChaCha8Rng) -> usize {
    let (lo, hi) = config.size_range;
    rng.random_range(lo..=hi)
}

fn abs_normal(mean: f64, sd: f64, rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    (mean + sd * z).abs()
}

fn draw_radius(config: &SimConfig, fixed: Option<f64>, rng: &mut ChaCha8Rng) -> f64 {
    // The normal draw is consumed even when pinned so the rest of the stream
    // does not depend on `fixed_radii`.
    let r = abs_normal(config.radius_mean, config.radius_sd, rng);
    fixed.unwrap_or(r)
}

fn draw_proportion(config: &SimConfig, rng: &mut ChaCha8Rng) -> f64 {
    let beta = Beta::new(10.0, 10.0).expect("valid beta parameters");
    let p = beta.sample(rng);
    config.proportion.unwrap_or(p)
}

fn angles(n: usize, equispaced: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if equispaced {
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    } else {
        (0..n).map(|_| rng.random::<f64>() * TAU).collect()
    }
}

/// Adds N(0, scale * c^2 I) noise to each 2-D point, `scale` given per point.
fn add_noise(points: &mut [Vec<f64>], scales: &[f64], c: f64, rng: &mut ChaCha8Rng) {
    if c == 0.0 {
        return;
    }
    for (p, &scale) in points.iter_mut().zip(scales) {
        let sd = c * scale.sqrt();
        for x in p.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x += sd * z;
        }
    }
}

fn circle_points(config: &SimConfig, fixed: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = draw_size(config, rng);
    let r = draw_radius(config, fixed, rng);
    let mut pts: Vec<Vec<f64>> =
        angles(m, config.equispaced, rng).into_iter().map(|a| vec![r * a.cos(), r * a.sin()]).collect();
    add_noise(&mut pts, &vec![r; m], config.noise_sigma_factor, rng);
    pts
}

/// Large circle of radius R centred at the origin, small circle of radius
/// R * p centred at (R + R * p, 0): the two touch at (R, 0). Points are split
/// evenly between the circles (the larger circle takes the odd point).
fn two_circle_points(config: &SimConfig, fixed: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = draw_size(config, rng);
    let big = draw_radius(config, fixed, rng);
    let small = big * draw_proportion(config, rng);
    let n_big = m.div_ceil(2);
    let n_small = m - n_big;
    let centre = big + small;
    let mut pts = Vec::with_capacity(m);
    let mut scales = Vec::with_capacity(m);
    for a in angles(n_big, config.equispaced, rng) {
        pts.push(vec![big * a.cos(), big * a.sin()]);
        scales.push(big);
    }
    for a in angles(n_small, config.equispaced, rng) {
        // Start the small circle's angles at its tangent point.
        let a = a + PI;
        pts.push(vec![centre + small * a.cos(), small * a.sin()]);
        scales.push(small);
    }
    add_noise(&mut pts, &scales, config.noise_sigma_factor, rng);
    pts
}

/// Inner polar angle of both spiral arms. Starting away from the origin keeps
/// the arms apart, so the arms only merge across the inter-arm gap.
pub const SPIRAL_START_ANGLE: f64 = PI;

/// Arc length of rho = a * theta from 0 to theta.
fn spiral_arc_length(a: f64, theta: f64) -> f64 {
    0.5 * a * (theta * (1.0 + theta * theta).sqrt() + theta.asinh())
}

fn spiral_angle_at_length(a: f64, target: f64, lo: f64, hi: f64) -> f64 {
    // Newton on a strictly increasing, convex function, safeguarded by bisection.
    let (mut lo, mut hi) = (lo, hi);
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = spiral_arc_length(a, theta) - target;
        if f.abs() <= 1e-14 * target.max(1.0) {
            break;
        }
        if f > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let step = f / (a * (1.0 + theta * theta).sqrt());
        let next = theta - step;
        theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    theta
}

/// Outer radius of every spiral arm.
pub const SPIRAL_OUTER_RADIUS: f64 = 1.0;

/// Two Archimedean arms rho = a * theta, the second rotated by pi, with
/// `a = 1 / (2 pi u)` so both end at radius 1 after `u` revolutions. Points
/// are uniform in arc length on `[SPIRAL_START_ANGLE, 2 pi u]`.
fn spiral_points(config: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = draw_size(config, rng);
    let (ulo, uhi) = config.revolutions;
    let u = if ulo == uhi { ulo } else { rng.random_range(ulo..uhi) };
    let theta_max = TAU * u;
    let a = SPIRAL_OUTER_RADIUS / theta_max;
    let s0 = spiral_arc_length(a, SPIRAL_START_ANGLE);
    let s1 = spiral_arc_length(a, theta_max);
    let n_first = m.div_ceil(2);
    let mut pts = Vec::with_capacity(m);
    for k in 0..m {
        let s = s0 + rng.random::<f64>() * (s1 - s0);
        let theta = spiral_angle_at_length(a, s, SPIRAL_START_ANGLE, theta_max);
        let rho = a * theta;
        let (x, y) = (rho * theta.cos(), rho * theta.sin());
        pts.push(if k < n_first { vec![x, y] } else { vec![-x, -y] });
    }
    pts
}

/// Torus around the z axis with major radius R and minor radius R * p.
/// The tube angle is drawn by acceptance-rejection against the area element
/// (R + r cos theta), which makes the sample uniform in surface area.
fn torus_points(config: &SimConfig, fixed: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = draw_size(config, rng);
    let major = draw_radius(config, fixed, rng);
    let minor = major * draw_proportion(config, rng);
    let mut pts = Vec::with_capacity(m);
    while pts.len() < m {
        let theta = rng.random::<f64>() * TAU;
        let phi = rng.random::<f64>() * TAU;
        let accept = rng.random::<f64>() * (major + minor);
        if accept > major + minor * theta.cos() {
            continue;
        }
        let w = major + minor * theta.cos();
        pts.push(vec![w * phi.cos(), w * phi.sin(), minor * theta.sin()]);
    }
    let scales = vec![minor; m];
    add_noise(&mut pts, &scales, config.noise_sigma_factor, rng);
    pts
}
