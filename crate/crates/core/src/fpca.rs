//! Principal components of amplitude variability on aligned SRVFs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::elastic::grid;
use crate::elastic::{inverse_srvf, SrvfCurve};
use crate::error::{invalid, Error, Result};
use crate::landscape::Landscape;
use crate::par;

/// Eigenvalues above this negative bound are rounding noise and clamp to 0.
pub const VARIANCE_FLOOR: f64 = -1e-10;

/// Default number of retained components.
pub const DEFAULT_COMPONENTS: usize = 2;

/// Sample covariance of SRVFs about a mean, kept as residuals.
#[derive(Debug, Clone)]
pub struct AmplitudeCovariance {
    mean_srvf: SrvfCurve,
    residuals: Vec<SrvfCurve>,
}

impl AmplitudeCovariance {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }

    pub fn mean_srvf(&self) -> &SrvfCurve {
        &self.mean_srvf
    }

    /// Trace of the covariance operator, `Σ ‖q_i - μ‖² / (n - 1)`.
    pub fn trace(&self) -> f64 {
        self.residuals.iter().map(|r| r.norm().powi(2)).sum::<f64>() / (self.n() - 1) as f64
    }

    /// Kernel samples `C[(c, m), (c', m')]`, indexed level-major.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let x = self.data_matrix(false);
        x.transpose() * &x / (self.n() - 1) as f64
    }

    /// `n x (K T)` matrix of residuals, optionally scaled by `sqrt` of the
    /// trapezoid weights so that Euclidean products match the L2 product.
    fn data_matrix(&self, weighted: bool) -> DMatrix<f64> {
        let (k, t) = (self.mean_srvf.k(), self.mean_srvf.t());
        let root_w: Vec<f64> = if weighted {
            grid::trapz_weights(t).into_iter().map(f64::sqrt).collect()
        } else {
            vec![1.0; t]
        };
        DMatrix::from_fn(self.n(), k * t, |i, col| {
            let (c, m) = (col / t, col % t);
            self.residuals[i].values()[c][m] * root_w[m]
        })
    }
}

fn check_grid(reference: &SrvfCurve, q: &SrvfCurve) -> Result<()> {
    reference.same_shape(q)?;
    if reference.scale_s() != q.scale_s() {
        return Err(Error::DimensionMismatch("curves live on different domains".into()));
    }
    Ok(())
}

pub fn amplitude_covariance(srvfs: &[SrvfCurve], mean_srvf: &SrvfCurve) -> Result<AmplitudeCovariance> {
    if srvfs.len() < 2 {
        return Err(invalid("a covariance needs at least two curves"));
    }
    let residuals = srvfs
        .iter()
        .map(|q| {
            check_grid(mean_srvf, q)?;
            Ok(q.axpy(-1.0, mean_srvf))
        })
        .collect::<Result<_>>()?;
    Ok(AmplitudeCovariance { mean_srvf: mean_srvf.clone(), residuals })
}

/// Mean, leading directions and variances of a sample of SRVFs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: SrvfCurve,
    /// Orthonormal eigenfunctions, most variable first.
    pub directions: Vec<SrvfCurve>,
    /// Variances of the retained directions, descending.
    pub variances: Vec<f64>,
    /// The `n - 1` leading eigenvalues of the covariance, descending.
    pub spectrum: Vec<f64>,
    /// Homological degree of the landscapes the model was fitted on.
    pub degree: usize,
}

impl PcaModel {
    /// Number of retained components.
    pub fn b(&self) -> usize {
        self.directions.len()
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    /// Share of the total variance carried by the first `b` eigenvalues.
    pub fn explained_fraction(&self, b: usize) -> f64 {
        let total: f64 = self.spectrum.iter().sum();
        if total <= 0.0 {
            return 1.0;
        }
        self.spectrum.iter().take(b).sum::<f64>() / total
    }
}

/// Top-`b` eigenpairs from the eigendecomposition of the `n x n` Gram matrix
/// of weighted residuals. Directions spanning no variance are completed to an
/// orthonormal set. Each direction is signed so that the first residual
/// projects nonnegatively.
pub fn amplitude_pca(cov: &AmplitudeCovariance, b: usize) -> Result<PcaModel> {
    let n = cov.n();
    let (k, t) = (cov.mean_srvf.k(), cov.mean_srvf.t());
    let dim = k * t;
    if b == 0 || b > n - 1 || b > dim {
        return Err(invalid(format!("need 1 <= B <= n - 1 = {}, got B = {b}", n - 1)));
    }
    let x = cov.data_matrix(true);
    let eig = SymmetricEigen::new(&x * x.transpose());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let mut spectrum = Vec::with_capacity(n);
    for &i in &order {
        let tau = eig.eigenvalues[i] / (n - 1) as f64;
        if tau < VARIANCE_FLOOR || !tau.is_finite() {
            return Err(Error::Numerical(format!("covariance eigenvalue {tau}")));
        }
        spectrum.push(tau.max(0.0));
    }
    spectrum.truncate(n - 1);

    let cutoff = 1e-10 * lambda_max;
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(b);
    for &i in &order[..b] {
        let lambda = eig.eigenvalues[i];
        if lambda > cutoff && lambda > 0.0 {
            let v = x.transpose() * eig.eigenvectors.column(i) / lambda.sqrt();
            if let Some(v) = orthonormalize(v, &basis) {
                basis.push(v);
                continue;
            }
        }
        let fill = (0..dim)
            .find_map(|j| orthonormalize(DVector::from_fn(dim, |r, _| if r == j { 1.0 } else { 0.0 }), &basis))
            .ok_or_else(|| Error::Numerical("could not complete an orthonormal basis".into()))?;
        basis.push(fill);
    }

    let root_w: Vec<f64> = grid::trapz_weights(t).into_iter().map(f64::sqrt).collect();
    let first = &cov.residuals[0];
    let directions = basis
        .iter()
        .map(|v| {
            let values: Vec<Vec<f64>> = (0..k).map(|c| (0..t).map(|m| v[c * t + m] / root_w[m]).collect()).collect();
            let phi = SrvfCurve::new(values, cov.mean_srvf.scale_s())?;
            Ok(if grid::inner(first.values(), phi.values()) < 0.0 { phi.axpy(-2.0, &phi) } else { phi })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PcaModel {
        mean: cov.mean_srvf.clone(),
        directions,
        variances: spectrum[..b].to_vec(),
        spectrum,
        degree: 1,
    })
}

/// Two passes of Gram-Schmidt against `basis`; `None` if little is left.
fn orthonormalize(mut v: DVector<f64>, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    let start = v.norm();
    for _ in 0..2 {
        for e in basis {
            let c = e.dot(&v);
            v.axpy(-c, e, 1.0);
        }
    }
    let len = v.norm();
    (len > 0.5 * start && len > 0.0).then(|| v / len)
}

/// Covariance about the sample mean followed by [`amplitude_pca`].
pub fn fit_pca(srvfs: &[SrvfCurve], b: usize, degree: usize) -> Result<PcaModel> {
    let mean = SrvfCurve::mean(srvfs)?;
    Ok(amplitude_pca(&amplitude_covariance(srvfs, &mean)?, b)?.with_degree(degree))
}

/// `β_{i,b} = ⟨q_i - μ, φ_b⟩`, one row per curve.
pub fn pc_scores(srvfs: &[SrvfCurve], model: &PcaModel) -> Result<Vec<Vec<f64>>> {
    for q in srvfs {
        check_grid(&model.mean, q)?;
    }
    Ok(par::map(srvfs, |q| {
        let r = q.axpy(-1.0, &model.mean);
        model.directions.iter().map(|phi| grid::inner(r.values(), phi.values())).collect()
    }))
}

/// Landscape `nu` standard deviations from the mean along component `b` (1-based).
pub fn pc_path(model: &PcaModel, b: usize, nu: f64) -> Result<Landscape> {
    if b == 0 || b > model.b() {
        return Err(invalid(format!("component {b} not in 1..={}", model.b())));
    }
    let q = model.mean.axpy(nu * model.variances[b - 1].sqrt(), &model.directions[b - 1]);
    inverse_srvf(&q, model.degree)
}
