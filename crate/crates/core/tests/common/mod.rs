//! Brute-force oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use landskew::elastic::{SrvfCurve, Warp, MAX_STEP};
use landskew::persistence::min_enclosing_radius;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Merge heights of agglomerative single linkage, found by brute force.
pub fn single_linkage_heights(points: &[Vec<f64>]) -> Vec<f64> {
    let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    let mut heights = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        let d = dist(&points[i], &points[j]);
                        if d < best.0 {
                            best = (d, a, b);
                        }
                    }
                }
            }
        }
        let merged = clusters.remove(best.2);
        clusters[best.1].extend(merged);
        heights.push(best.0);
    }
    heights
}

pub fn rank_gf2(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = rows.iter().position(|&r| r >> bit & 1 == 1) else { continue };
        let pivot = rows.swap_remove(p);
        for r in rows.iter_mut() {
            if *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Full 2-skeleton on the vertex set with explicit values.
pub struct Skeleton {
    pub edges: Vec<(usize, usize, f64)>,
    pub triangles: Vec<([usize; 3], f64)>,
}

impl Skeleton {
    pub fn build(n: usize, edge: impl Fn(usize, usize) -> f64, tri: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, edge(i, j)));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    triangles.push(([i, j, k], tri(i, j, k)));
                }
            }
        }
        Skeleton { edges, triangles }
    }

    pub fn edge_index(&self, i: usize, j: usize) -> usize {
        self.edges.iter().position(|&(a, b, _)| a == i && b == j).unwrap()
    }

    /// Rank of `H1(K_a) -> H1(K_b)`.
    pub fn persistent_betti(&self, a: f64, b: f64) -> usize {
        let in_a: Vec<bool> = self.edges.iter().map(|e| e.2 <= a).collect();
        let in_b: Vec<bool> = self.edges.iter().map(|e| e.2 <= b).collect();
        let d1: Vec<u64> = self.edges.iter().filter(|e| e.2 <= a).map(|&(i, j, _)| 1u64 << i | 1u64 << j).collect();
        let cycles_a = d1.len() - rank_gf2(d1);
        let columns: Vec<u64> = self
            .triangles
            .iter()
            .filter(|t| t.1 <= b)
            .map(|&([i, j, k], _)| {
                [(i, j), (i, k), (j, k)].iter().fold(0u64, |m, &(x, y)| m | 1u64 << self.edge_index(x, y))
            })
            .collect();
        let outside: u64 = (0..self.edges.len()).filter(|&e| in_b[e] && !in_a[e]).fold(0, |m, e| m | 1 << e);
        let bounded = rank_gf2(columns.clone()) - rank_gf2(columns.iter().map(|c| c & outside).collect());
        cycles_a - bounded
    }

    /// Finite pairs from inclusion-exclusion of persistent Betti numbers.
    pub fn degree1_pairs(&self) -> Vec<(f64, f64)> {
        let mut crit: Vec<f64> = self.edges.iter().map(|e| e.2).chain(self.triangles.iter().map(|t| t.1)).collect();
        crit.sort_by(f64::total_cmp);
        crit.dedup();
        let beta = |i: isize, j: usize| if i < 0 { 0 } else { self.persistent_betti(crit[i as usize], crit[j]) as isize };
        let mut pairs = Vec::new();
        for i in 0..crit.len() {
            for j in i + 1..crit.len() {
                let ii = i as isize;
                let mu = beta(ii, j - 1) - beta(ii - 1, j - 1) - beta(ii, j) + beta(ii - 1, j);
                assert!(mu >= 0);
                pairs.extend(std::iter::repeat_n((crit[i], crit[j]), mu as usize));
            }
        }
        pairs
    }
}

pub fn rips_oracle(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let e = |i: usize, j: usize| 0.5 * dist(&points[i], &points[j]);
    Skeleton::build(points.len(), e, |i, j, k| e(i, j).max(e(i, k)).max(e(j, k))).degree1_pairs()
}

pub fn cech_oracle(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let p = |i: usize| [points[i][0], points[i][1]];
    let e = |i: usize, j: usize| 0.5 * dist(&points[i], &points[j]);
    Skeleton::build(points.len(), e, |i, j, k| min_enclosing_radius(p(i), p(j), p(k))).degree1_pairs()
}

/// Cost of one lattice step from `(k, l)` by `(a, b)`, written out directly.
pub fn step_cost(q1: &SrvfCurve, q2: &SrvfCurve, k: usize, l: usize, a: usize, b: usize) -> f64 {
    let t = q1.t();
    let h = 1.0 / (t - 1) as f64;
    let root = (b as f64 / a as f64).sqrt();
    let mut cost = 0.0;
    for s in 0..=a {
        let w = if s == 0 || s == a { 0.5 * h } else { h };
        let pos = l as f64 + (b * s) as f64 / a as f64;
        for c in 0..q1.k() {
            let row = &q2.values()[c];
            let i = pos.floor() as usize;
            let f = pos - i as f64;
            let y = if i + 1 < t { row[i] + f * (row[i + 1] - row[i]) } else { row[i] };
            let d = q1.values()[c][k + s] - root * y;
            cost += w * d * d;
        }
    }
    cost
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn all_steps() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=MAX_STEP {
        for b in 1..=MAX_STEP {
            if gcd(a, b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Minimum path cost by exhaustive depth-first search.
pub fn dfs_min(q1: &SrvfCurve, q2: &SrvfCurve, k: usize, l: usize, steps: &[(usize, usize)]) -> f64 {
    let last = q1.t() - 1;
    if k == last && l == last {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for &(a, b) in steps {
        if k + a <= last && l + b <= last {
            best = best.min(step_cost(q1, q2, k, l, a, b) + dfs_min(q1, q2, k + a, l + b, steps));
        }
    }
    best
}

/// Minimum path cost by an unpruned forward recursion over the whole lattice.
pub fn full_dp_min(q1: &SrvfCurve, q2: &SrvfCurve) -> f64 {
    let t = q1.t();
    let steps = all_steps();
    let mut e = vec![vec![f64::INFINITY; t]; t];
    e[0][0] = 0.0;
    for i in 1..t {
        for j in 1..t {
            for &(a, b) in &steps {
                if a <= i && b <= j && e[i - a][j - b].is_finite() {
                    e[i][j] = e[i][j].min(e[i - a][j - b] + step_cost(q1, q2, i - a, j - b, a, b));
                }
            }
        }
    }
    e[t - 1][t - 1]
}

/// Cost of the path traced by a warp whose nodes lie on the lattice.
pub fn path_cost(q1: &SrvfCurve, q2: &SrvfCurve, w: &Warp) -> f64 {
    let last = (q1.t() - 1) as f64;
    let cols: Vec<f64> = w.values().iter().map(|g| g * last).collect();
    let mut nodes = vec![0usize];
    for (i, c) in cols.iter().enumerate().skip(1) {
        if (c - c.round()).abs() < 1e-9 {
            nodes.push(i);
        }
    }
    nodes
        .windows(2)
        .map(|p| {
            let (k, i) = (p[0], p[1]);
            let (l, j) = (cols[k].round() as usize, cols[i].round() as usize);
            let g = gcd(i - k, j - l);
            // Collinear runs of a step are split into unit steps.
            (0..g).map(|r| step_cost(q1, q2, k + r * (i - k) / g, l + r * (j - l) / g, (i - k) / g, (j - l) / g)).sum::<f64>()
        })
        .sum()
}

