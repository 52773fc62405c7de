//! Diagram denoising through alignment warps, spread diagnostics and
//! two-group mean comparison.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::elastic::{align_srvf, compose_warps, inverse_srvf, karcher_mean, AlignmentResult, KarcherOptions, SrvfCurve, Warp};
use crate::error::{invalid, Error, Result};
use crate::landscape::Landscape;
use crate::par;
use crate::persistence::{PersistenceDiagram, UnionFind};

/// Slack allowed when checking that normalized pairs lie in [0, 1].
const DOMAIN_SLACK: f64 = 1e-12;

/// A diagram in normalized coordinates next to its image under `γ⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoisedDiagram {
    pub degree: usize,
    pub scale_s: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub warp_id: String,
    /// Pairs divided by `scale_s`, sorted as in the source diagram.
    pub original: Vec<(f64, f64)>,
    /// `(γ⁻¹(b), γ⁻¹(d))` for each original pair, same order.
    pub transformed: Vec<(f64, f64)>,
}

impl DenoisedDiagram {
    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    /// Indices ordered by decreasing original persistence (ties: earlier birth).
    pub fn persistence_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.original.len()).collect();
        idx.sort_by(|&a, &b| {
            let (pa, pb) = (self.original[a], self.original[b]);
            (pb.1 - pb.0).total_cmp(&(pa.1 - pa.0)).then(pa.0.total_cmp(&pb.0)).then(pa.1.total_cmp(&pb.1))
        });
        idx
    }

    /// Index of the `j`-th most persistent pair (1-based), if present.
    pub fn ranked(&self, j: usize) -> Option<usize> {
        if j == 0 {
            return None;
        }
        self.persistence_order().get(j - 1).copied()
    }

    /// The `count` most persistent pairs as (original, transformed).
    pub fn dominant(&self, count: usize) -> Vec<((f64, f64), (f64, f64))> {
        self.persistence_order().into_iter().take(count).map(|i| (self.original[i], self.transformed[i])).collect()
    }
}

/// Normalizes `dg` by `s` and maps each coordinate through `γ⁻¹`.
pub fn transform_diagram(dg: &PersistenceDiagram, warp: &Warp, s: f64) -> Result<DenoisedDiagram> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid(format!("domain scale must be positive, got {s}")));
    }
    let mut original = Vec::with_capacity(dg.len());
    let mut transformed = Vec::with_capacity(dg.len());
    for &(b, d) in dg.pairs() {
        let (nb, nd) = (b / s, d / s);
        if !(nb >= -DOMAIN_SLACK && nd <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain { birth: nb, death: nd });
        }
        let (nb, nd) = (nb.max(0.0), nd.min(1.0));
        original.push((nb, nd));
        transformed.push((warp.inverse_at(nb), warp.inverse_at(nd)));
    }
    Ok(DenoisedDiagram { degree: dg.degree(), scale_s: s, warp_id: String::new(), original, transformed })
}

/// Transforms many diagrams with their warps in parallel.
pub fn transform_diagrams(diagrams: &[PersistenceDiagram], warps: &[Warp], s: f64) -> Result<Vec<DenoisedDiagram>> {
    if diagrams.len() != warps.len() {
        return Err(Error::DimensionMismatch(format!("{} diagrams but {} warps", diagrams.len(), warps.len())));
    }
    let jobs: Vec<(&PersistenceDiagram, &Warp)> = diagrams.iter().zip(warps).collect();
    par::map(&jobs, |(dg, w)| transform_diagram(dg, w, s)).into_iter().collect()
}

/// Which coordinates a spread is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Original,
    Transformed,
}

/// Mean pairwise distance among the selected points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub spread: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Mean pairwise Euclidean distance among the `j`-th most persistent pairs
/// of the diagrams. Diagrams with fewer than `j` pairs are skipped.
pub fn diagram_spread(dgs: &[DenoisedDiagram], j: usize, stage: Stage) -> Spread {
    let mut points = Vec::with_capacity(dgs.len());
    let mut skipped = 0;
    for dg in dgs {
        match dg.ranked(j) {
            Some(i) => points.push(match stage {
                Stage::Original => dg.original[i],
                Stage::Transformed => dg.transformed[i],
            }),
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        warn!("{skipped} diagram(s) have fewer than {j} pairs and were skipped");
    }
    Spread { spread: mean_pairwise_distance(&points), used: points.len(), skipped }
}

/// Mean Euclidean distance over unordered pairs; 0 for fewer than two points.
pub fn mean_pairwise_distance(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            total += (points[a].0 - points[b].0).hypot(points[a].1 - points[b].1);
        }
    }
    total / (n * (n - 1) / 2) as f64
}

/// Distance of `(b, d)` to the diagonal `b = d`.
pub fn diagonal_distance(pair: (f64, f64)) -> f64 {
    (pair.1 - pair.0) / std::f64::consts::SQRT_2
}

/// Single-linkage cluster labels with merge threshold `cut`. Labels are
/// numbered by first appearance.
pub fn single_linkage(points: &[(f64, f64)], cut: f64) -> Vec<usize> {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if (points[a].0 - points[b].0).hypot(points[a].1 - points[b].1) <= cut {
                uf.union(a, b);
            }
        }
    }
    let mut names = std::collections::HashMap::new();
    (0..n)
        .map(|i| {
            let root = uf.find(i);
            let next = names.len();
            *names.entry(root).or_insert(next)
        })
        .collect()
}

/// Number of single-linkage clusters at threshold `cut`.
pub fn cluster_count(points: &[(f64, f64)], cut: f64) -> usize {
    single_linkage(points, cut).into_iter().max().map_or(0, |m| m + 1)
}

/// Result of [`group_compare`].
#[derive(Debug, Clone)]
pub struct GroupComparison {
    pub labels: [String; 2],
    /// Within-group Karcher means.
    pub group_means: [Landscape; 2],
    pub group_alignments: [AlignmentResult; 2],
    pub pooled: AlignmentResult,
    /// Warp of each group mean onto the pooled mean.
    pub group_to_pool_warps: [Warp; 2],
    /// Group means after warping onto the pooled mean.
    pub phase_matched_means: [Landscape; 2],
    /// Per-subject warps `γ_i ∘ γ̄_group` into the pooled phase.
    pub subject_warps: [Vec<Warp>; 2],
    /// SRVF difference of the phase-matched means.
    pub difference_srvf: SrvfCurve,
    /// `Q⁻¹` image of `difference_srvf`.
    pub difference: Landscape,
    /// Pointwise difference of the unaligned group averages.
    pub pointwise_difference: Landscape,
}

fn pointwise_mean(ls: &[Landscape]) -> Result<Landscape> {
    let first = &ls[0];
    let mut acc = vec![vec![0.0; first.t()]; first.k()];
    for l in ls {
        for (a, r) in acc.iter_mut().zip(l.values()) {
            a.iter_mut().zip(r).for_each(|(x, y)| *x += y);
        }
    }
    let n = ls.len() as f64;
    acc.iter_mut().flatten().for_each(|x| *x /= n);
    first.with_values(acc)
}

fn difference(a: &Landscape, b: &Landscape) -> Result<Landscape> {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect();
    a.with_values(values)
}

/// Compares two labelled groups on a shared domain: Karcher means per group
/// and pooled, each group mean aligned to the pooled mean, then the SRVF
/// difference of the phase-matched means and the unaligned baseline.
pub fn group_compare(
    group_a: &[Landscape],
    group_b: &[Landscape],
    labels: [&str; 2],
    opts: &KarcherOptions,
) -> Result<GroupComparison> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(invalid("both groups must be nonempty"));
    }
    let first = &group_a[0];
    for l in group_a.iter().chain(group_b) {
        if l.k() != first.k() || l.t() != first.t() || l.scale_s() != first.scale_s() {
            return Err(Error::DimensionMismatch("groups must share K, T and the common domain".into()));
        }
    }
    let align_a = karcher_mean(group_a, opts)?;
    let align_b = karcher_mean(group_b, opts)?;
    let pooled_sample: Vec<Landscape> = group_a.iter().chain(group_b).cloned().collect();
    let pooled = karcher_mean(&pooled_sample, opts)?;

    let to_pool_a = align_srvf(&pooled.mean_srvf, &align_a.mean_srvf)?;
    let to_pool_b = align_srvf(&pooled.mean_srvf, &align_b.mean_srvf)?;
    let degree = first.degree();
    let difference_srvf = to_pool_a.warped.axpy(-1.0, &to_pool_b.warped);
    let diff = inverse_srvf(&difference_srvf, degree)?;
    let matched_a = inverse_srvf(&to_pool_a.warped, degree)?;
    let matched_b = inverse_srvf(&to_pool_b.warped, degree)?;

    let subject = |res: &AlignmentResult, bar: &Warp| -> Result<Vec<Warp>> {
        res.warps.iter().map(|w| compose_warps(w, bar)).collect()
    };
    let subject_a = subject(&align_a, &to_pool_a.warp)?;
    let subject_b = subject(&align_b, &to_pool_b.warp)?;
    let pointwise = difference(&pointwise_mean(group_a)?, &pointwise_mean(group_b)?)?;

    Ok(GroupComparison {
        labels: [labels[0].to_string(), labels[1].to_string()],
        group_means: [align_a.mean.clone(), align_b.mean.clone()],
        group_alignments: [align_a, align_b],
        pooled,
        group_to_pool_warps: [to_pool_a.warp, to_pool_b.warp],
        phase_matched_means: [matched_a, matched_b],
        subject_warps: [subject_a, subject_b],
        difference_srvf,
        difference: diff,
        pointwise_difference: pointwise,
    })
}
