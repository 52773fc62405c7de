//! Elastic distance, Karcher mean and orbit centering.

use log::debug;

use super::dp::dp_align;
use super::grid;
use super::srvf::{inverse_srvf, srvf, SrvfCurve};
use super::warp::{compose_landscape, compose_warps, invert_warp, warp_action, Warp};
use crate::error::{invalid, Error, Result};
use crate::landscape::Landscape;
use crate::par;

/// Default relative SSE tolerance.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 20;

/// Centering stops once the mean warp is this close to the identity.
pub const CENTER_TOL: f64 = 1e-3;

/// A warp aligning one SRVF to another and the resulting distance.
#[derive(Debug, Clone)]
pub struct SrvfAlignment {
    pub distance: f64,
    pub warp: Warp,
    pub warped: SrvfCurve,
}

/// Best warp of `q2` onto `q1`. Falls back to the identity when the lattice
/// optimum does not beat it under the grid action.
pub fn align_srvf(q1: &SrvfCurve, q2: &SrvfCurve) -> Result<SrvfAlignment> {
    let dp = dp_align(q1, q2)?;
    let warped = warp_action(q2, &dp.warp)?;
    let d = q1.distance(&warped);
    let d_id = q1.distance(q2);
    if d_id <= d {
        return Ok(SrvfAlignment { distance: d_id, warp: Warp::identity(q1.t()), warped: q2.clone() });
    }
    Ok(SrvfAlignment { distance: d, warp: dp.warp, warped })
}

/// Amplitude distance between two landscapes and the warp `γ` with
/// `Λ₂ ∘ γ` matched to `Λ₁`.
pub fn elastic_distance(l1: &Landscape, l2: &Landscape) -> Result<(f64, Warp)> {
    if l1.k() != l2.k() || l1.t() != l2.t() {
        return Err(Error::DimensionMismatch(format!(
            "landscapes are {}x{} and {}x{}",
            l1.k(),
            l1.t(),
            l2.k(),
            l2.t()
        )));
    }
    let a = align_srvf(&srvf(l1)?, &srvf(l2)?)?;
    Ok((a.distance, a.warp))
}

/// Options of [`karcher_mean`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KarcherOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Recenter the warps so their mean is the identity.
    pub center: bool,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        KarcherOptions { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, center: true }
    }
}

/// Output of [`karcher_mean`].
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub mean: Landscape,
    pub mean_srvf: SrvfCurve,
    pub warps: Vec<Warp>,
    pub aligned: Vec<Landscape>,
    pub aligned_srvfs: Vec<SrvfCurve>,
    /// Sum of squared distances to the running mean, one entry per iteration.
    pub sse_trace: Vec<f64>,
    /// Index of the input used as the starting template.
    pub template: usize,
    pub converged: bool,
}

impl AlignmentResult {
    pub fn len(&self) -> usize {
        self.warps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.warps.is_empty()
    }

    /// True if the SSE trace never increases beyond rounding.
    pub fn sse_non_increasing(&self) -> bool {
        self.sse_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300)
    }
}

fn check_sample(landscapes: &[Landscape]) -> Result<()> {
    let first = landscapes.first().ok_or_else(|| invalid("need at least one landscape"))?;
    for l in landscapes {
        if l.k() != first.k() || l.t() != first.t() {
            return Err(Error::DimensionMismatch("landscapes differ in K or T".into()));
        }
        if l.scale_s() != first.scale_s() {
            return Err(invalid("landscapes are not on a common domain"));
        }
    }
    Ok(())
}

/// Input whose summed squared unaligned distance to the others is smallest.
fn medoid(qs: &[SrvfCurve]) -> usize {
    let n = qs.len();
    let rows = par::map_range(n, |i| (0..n).map(|j| grid::dist_sq(qs[i].values(), qs[j].values())).sum::<f64>());
    let mut best = 0;
    for (i, &v) in rows.iter().enumerate() {
        if v < rows[best] {
            best = i;
        }
    }
    best
}

/// Iterative template estimation: align every input to the current mean,
/// average the aligned SRVFs, move the template to the center of its orbit,
/// repeat. A fresh warp replaces the previous one only if it is closer to the
/// current mean, and a round whose objective exceeds the last one is
/// discarded and ends the iteration, so the SSE trace never increases.
pub fn karcher_mean(landscapes: &[Landscape], opts: &KarcherOptions) -> Result<AlignmentResult> {
    check_sample(landscapes)?;
    if !(opts.tol >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    let degree = landscapes[0].degree();
    let t = landscapes[0].t();
    let qs: Vec<SrvfCurve> = par::map(landscapes, srvf).into_iter().collect::<Result<_>>()?;
    let template = medoid(&qs);
    let mut mean = qs[template].clone();
    let mut warps = vec![Warp::identity(t); qs.len()];
    let mut aligned: Vec<SrvfCurve> = qs.clone();
    let mut trace = Vec::new();
    let mut converged = qs.len() == 1;

    if qs.len() == 1 {
        trace.push(0.0);
    }
    let mut iter = 0;
    while !converged && iter < opts.max_iter.max(1) {
        iter += 1;
        let steps: Vec<(Warp, SrvfCurve, f64)> = par::map_range(qs.len(), |i| -> Result<(Warp, SrvfCurve, f64)> {
            let fresh = align_srvf(&mean, &qs[i])?;
            let fresh_e = fresh.distance * fresh.distance;
            let kept = warp_action(&qs[i], &warps[i])?;
            let kept_e = grid::dist_sq(mean.values(), kept.values());
            Ok(if kept_e <= fresh_e { (warps[i].clone(), kept, kept_e) } else { (fresh.warp, fresh.warped, fresh_e) })
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let sse: f64 = steps.iter().map(|s| s.2).sum();
        debug!("karcher iteration {iter}: sse {sse:.6e}");
        if let Some(&prev) = trace.last() {
            let prev: f64 = prev;
            if sse > prev {
                // Recentering cost more than this round gained; keep the previous state.
                converged = true;
                break;
            }
            converged = prev <= 0.0 || (prev - sse) / prev < opts.tol;
        } else {
            converged = sse <= 0.0;
        }
        trace.push(sse);
        warps = steps.iter().map(|s| s.0.clone()).collect();
        aligned = steps.into_iter().map(|s| s.1).collect();
        mean = SrvfCurve::mean(&aligned)?;
        if opts.center && qs.len() > 1 && !converged {
            warps = center_warps(&warps)?;
            aligned = act_all(&qs, &warps)?;
            mean = SrvfCurve::mean(&aligned)?;
        }
    }
    if opts.center && qs.len() > 1 {
        warps = center_warps(&warps)?;
        aligned = act_all(&qs, &warps)?;
    }
    let mean_srvf = SrvfCurve::mean(&aligned)?;
    let mean = inverse_srvf(&mean_srvf, degree)?;
    let aligned_landscapes = par::map(&landscapes.iter().zip(&warps).collect::<Vec<_>>(), |(l, w)| compose_landscape(l, w))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(AlignmentResult {
        mean,
        mean_srvf,
        warps,
        aligned: aligned_landscapes,
        aligned_srvfs: aligned,
        sse_trace: trace,
        template,
        converged,
    })
}

fn act_all(qs: &[SrvfCurve], warps: &[Warp]) -> Result<Vec<SrvfCurve>> {
    let jobs: Vec<(&SrvfCurve, &Warp)> = qs.iter().zip(warps).collect();
    par::map(&jobs, |(q, w)| warp_action(q, w)).into_iter().collect()
}

/// Replaces `γ_i` by `γ_i ∘ γ̄⁻¹`, where `γ̄` is the pointwise mean warp,
/// until `γ̄` is within [`CENTER_TOL`] of the identity.
pub fn center_warps(warps: &[Warp]) -> Result<Vec<Warp>> {
    let mut current = warps.to_vec();
    for _ in 0..10 {
        let mean = Warp::mean(&current)?;
        if mean.deviation_from_identity() <= CENTER_TOL {
            break;
        }
        let inv = invert_warp(&mean);
        current = current.iter().map(|w| compose_warps(w, &inv)).collect::<Result<_>>()?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::unit_grid;

    fn tent(t: usize, b: f64, d: f64, s: f64) -> Landscape {
        let row = unit_grid(t).iter().map(|&u| (u - b).min(d - u).max(0.0)).collect();
        Landscape::new(vec![row], s, 1).unwrap()
    }

    #[test]
    fn single_input_is_its_own_mean() {
        let l = tent(65, 0.2, 0.7, 1.0);
        let r = karcher_mean(std::slice::from_ref(&l), &KarcherOptions::default()).unwrap();
        assert_eq!(r.warps, vec![Warp::identity(65)]);
        assert_eq!(r.sse_trace, vec![0.0]);
        let err = r.mean.values()[0].iter().zip(l.level(0)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 2.0 / 65.0);
    }

    #[test]
    fn identical_inputs_need_no_warping() {
        let l = tent(65, 0.2, 0.7, 1.0);
        let r = karcher_mean(&[l.clone(), l.clone(), l], &KarcherOptions::default()).unwrap();
        assert!(r.warps.iter().all(|w| w.deviation_from_identity() < 1e-12));
        assert!(r.sse_trace.iter().all(|&s| s < 1e-20));
    }

    #[test]
    fn centering_symmetric_pair() {
        let t = 129;
        let g = Warp::new(unit_grid(t).into_iter().map(|u| u * u).collect()).unwrap();
        let centered = center_warps(&[g.clone(), invert_warp(&g)]).unwrap();
        assert!(Warp::mean(&centered).unwrap().deviation_from_identity() <= CENTER_TOL);
        let ids = center_warps(&[Warp::identity(t), Warp::identity(t)]).unwrap();
        assert_eq!(ids, vec![Warp::identity(t); 2]);
    }

    #[test]
    fn rejects_mixed_domains() {
        assert!(karcher_mean(&[tent(33, 0.1, 0.5, 1.0), tent(33, 0.1, 0.5, 2.0)], &KarcherOptions::default()).is_err());
        assert!(karcher_mean(&[], &KarcherOptions::default()).is_err());
    }
}
