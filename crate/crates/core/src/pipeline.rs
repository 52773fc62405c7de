//! End-to-end runs: clouds to diagrams, landscapes, alignment and denoising.

use serde::{Deserialize, Serialize};

use crate::analysis::{transform_diagrams, DenoisedDiagram};
use crate::elastic::{karcher_mean, AlignmentResult, KarcherOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::elastic::{srvf, SrvfCurve};
use crate::error::Result;
use crate::fpca::{fit_pca, pc_scores, PcaModel};
use crate::landscape::{common_domain_end, default_k, landscapes_on_domain, Landscape, DEFAULT_DOMAIN_PAD, DEFAULT_GRID};
use crate::par;
use crate::persistence::{diagram, Complex, Convention, PersistenceDiagram, PhOptions, DEFAULT_MAX_POINTS};
use crate::simgen::PointCloud;

/// Topology and landscape settings of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub degree: usize,
    pub complex: Complex,
    pub convention: Convention,
    pub max_scale: Option<f64>,
    pub max_points: usize,
    /// Subsample clouds above this size before degree-1 computations.
    pub subsample: Option<usize>,
    pub subsample_seed: u64,
    /// Keep only the most persistent pairs of each diagram.
    pub top_j: Option<usize>,
    /// Number of landscape levels; defaults to the largest overlap in the sample.
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "T")]
    pub t: usize,
    pub domain_pad: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            degree: 1,
            complex: Complex::Rips,
            convention: Convention::Radius,
            max_scale: None,
            max_points: DEFAULT_MAX_POINTS,
            subsample: None,
            subsample_seed: 0,
            top_j: None,
            k: None,
            t: DEFAULT_GRID,
            domain_pad: DEFAULT_DOMAIN_PAD,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl AnalysisConfig {
    pub fn ph_options(&self) -> PhOptions {
        PhOptions { convention: self.convention, max_scale: self.max_scale, cap_essential: false, max_points: self.max_points }
    }

    pub fn karcher_options(&self) -> KarcherOptions {
        KarcherOptions { tol: self.tol, max_iter: self.max_iter, center: true }
    }
}

/// Diagrams of every cloud, after optional subsampling and top-J filtering.
pub fn compute_diagrams(clouds: &[PointCloud], cfg: &AnalysisConfig) -> Result<Vec<PersistenceDiagram>> {
    let opts = cfg.ph_options();
    par::map_range(clouds.len(), |i| {
        let cloud = &clouds[i];
        let dg = match cfg.subsample {
            Some(m) if cfg.degree >= 1 && cloud.len() > m => {
                diagram(&cloud.subsample(m, cfg.subsample_seed.wrapping_add(i as u64)), cfg.degree, cfg.complex, &opts)?
            }
            _ => diagram(cloud, cfg.degree, cfg.complex, &opts)?,
        };
        Ok(match cfg.top_j {
            Some(j) => dg.top_j(j),
            None => dg,
        })
    })
    .into_iter()
    .collect()
}

/// Landscapes of a sample on one padded common domain.
#[derive(Debug, Clone)]
pub struct LandscapeSample {
    pub landscapes: Vec<Landscape>,
    pub domain_end: f64,
    pub k: usize,
}

pub fn compute_landscapes(diagrams: &[PersistenceDiagram], cfg: &AnalysisConfig) -> Result<LandscapeSample> {
    let k = cfg.k.unwrap_or_else(|| default_k(diagrams));
    let domain_end = common_domain_end(diagrams, cfg.domain_pad)?;
    let landscapes = landscapes_on_domain(diagrams, k, cfg.t, domain_end)?
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.with_source_id(format!("{i:03}")))
        .collect();
    Ok(LandscapeSample { landscapes, domain_end, k })
}

/// Everything produced by [`run`].
#[derive(Debug, Clone)]
pub struct Run {
    pub diagrams: Vec<PersistenceDiagram>,
    pub sample: LandscapeSample,
    pub alignment: AlignmentResult,
    pub denoised: Vec<DenoisedDiagram>,
}

/// Diagrams, landscapes, Karcher alignment and transformed diagrams.
pub fn run(clouds: &[PointCloud], cfg: &AnalysisConfig) -> Result<Run> {
    let diagrams = compute_diagrams(clouds, cfg)?;
    run_from_diagrams(diagrams, cfg)
}

pub fn run_from_diagrams(diagrams: Vec<PersistenceDiagram>, cfg: &AnalysisConfig) -> Result<Run> {
    let sample = compute_landscapes(&diagrams, cfg)?;
    let alignment = karcher_mean(&sample.landscapes, &cfg.karcher_options())?;
    let mut denoised = transform_diagrams(&diagrams, &alignment.warps, sample.domain_end)?;
    for (i, d) in denoised.iter_mut().enumerate() {
        d.warp_id = format!("{i:03}");
    }
    Ok(Run { diagrams, sample, alignment, denoised })
}

/// Amplitude PCA of a run, on the aligned SRVFs or, with `aligned = false`,
/// on the raw ones. Returns the model and the per-cloud scores.
pub fn amplitude_pca_of(run: &Run, b: usize, aligned: bool) -> Result<(PcaModel, Vec<Vec<f64>>)> {
    let qs: Vec<SrvfCurve> = if aligned {
        run.alignment.aligned_srvfs.clone()
    } else {
        par::map(&run.sample.landscapes, srvf).into_iter().collect::<Result<_>>()?
    };
    let degree = run.sample.landscapes[0].degree();
    let model = fit_pca(&qs, b, degree)?;
    let scores = pc_scores(&qs, &model)?;
    Ok((model, scores))
}
