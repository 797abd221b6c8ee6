//! Gaussian mixture parameters, numerically stable responsibilities, and
//! the shrinkage-penalized objective.
//!
//! The objective maximized by the regularized fit is
//!
//! ℓ_η(Θ) = Σ_i ln Σ_k π_k N(x_i; μ_k, Σ_k) − Σ_k η_k Π(Σ_k, T_k)
//!
//! where Π(Σ, T) = ½ (tr(Σ⁻¹T) − ln det T + ln det Σ − m) is the
//! Kullback-Leibler divergence between zero-mean Gaussians with
//! covariances T and Σ. Components with η_k = 0 contribute no penalty
//! term. The classical fit maximizes the η ≡ 0 case.

use crate::linalg::{CholeskyFactor, LinalgError, SymMatrix};
use ndarray::{Array1, Array2};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("component counts disagree: {weights} weights, {means} means, {covariances} covariances")]
    ComponentMismatch {
        weights: usize,
        means: usize,
        covariances: usize,
    },
    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("weight {index} is negative: {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("component {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("covariance {index} failed to factor")]
    IndefiniteCovariance {
        index: usize,
        #[source]
        source: LinalgError,
    },
}

/// Mixture parameters: weights π, means μ, covariances Σ per component.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    pub weights: Vec<f64>,
    pub means: Vec<Array1<f64>>,
    pub covariances: Vec<SymMatrix>,
}

impl MixtureParams {
    pub fn component_count(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map(|m| m.len()).unwrap_or(0)
    }

    /// Checks weight simplex membership (1e-12 slack), consistent
    /// dimensions, and that every covariance factors.
    pub fn validate(&self) -> Result<(), ModelError> {
        let (kw, km, kc) = (self.weights.len(), self.means.len(), self.covariances.len());
        if kw != km || kw != kc {
            return Err(ModelError::ComponentMismatch {
                weights: kw,
                means: km,
                covariances: kc,
            });
        }
        for (index, &w) in self.weights.iter().enumerate() {
            if w < 0.0 {
                return Err(ModelError::NegativeWeight { index, value: w });
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::WeightSum { sum });
        }
        let dim = self.dim();
        for index in 0..kw {
            if self.means[index].len() != dim {
                return Err(ModelError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: self.means[index].len(),
                });
            }
            if self.covariances[index].dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: self.covariances[index].dim(),
                });
            }
            CholeskyFactor::factor(&self.covariances[index])
                .map_err(|source| ModelError::IndefiniteCovariance { index, source })?;
        }
        Ok(())
    }
}

/// Per-cluster shrinkage state: scaled identity targets T_k = θ̂_k I and
/// strengths η_k.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationState {
    pub targets: Vec<SymMatrix>,
    pub scales: Vec<f64>,
    pub etas: Vec<f64>,
}

impl RegularizationState {
    pub fn identity_targets(scales: Vec<f64>, etas: Vec<f64>, dim: usize) -> Self {
        let targets = scales
            .iter()
            .map(|&s| SymMatrix::scaled_identity(dim, s))
            .collect();
        Self { targets, scales, etas }
    }

    /// Replaces cluster k's target scale, rebuilding the stored target.
    pub fn set_scale(&mut self, k: usize, scale: f64, dim: usize) {
        self.scales[k] = scale;
        self.targets[k] = SymMatrix::scaled_identity(dim, scale);
    }
}

/// Per-component precomputation shared by density and responsibility
/// evaluations: ln π_k, the Cholesky factor of Σ_k, and the Gaussian
/// normalizer −(m/2) ln 2π − ½ ln det Σ_k.
pub struct Precomputed {
    pub ln_weights: Vec<f64>,
    pub chols: Vec<CholeskyFactor>,
    pub ln_norms: Vec<f64>,
    dim: usize,
}

impl Precomputed {
    pub fn build(params: &MixtureParams) -> Result<Self, ModelError> {
        let dim = params.dim();
        let mut ln_weights = Vec::with_capacity(params.component_count());
        let mut chols = Vec::with_capacity(params.component_count());
        let mut ln_norms = Vec::with_capacity(params.component_count());
        for (index, cov) in params.covariances.iter().enumerate() {
            let chol = CholeskyFactor::factor(cov)
                .map_err(|source| ModelError::IndefiniteCovariance { index, source })?;
            ln_weights.push(params.weights[index].ln());
            ln_norms.push(-0.5 * (dim as f64) * (2.0 * PI).ln() - 0.5 * chol.log_det());
            chols.push(chol);
        }
        Ok(Self { ln_weights, chols, ln_norms, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// ln N(x; μ_k, Σ_k). `scratch` must hold x − μ_k on entry and is
    /// overwritten.
    pub fn log_density_in_place(&self, k: usize, scratch: &mut [f64]) -> f64 {
        let q = self.chols[k].quadratic_form_in_place(scratch);
        self.ln_norms[k] - 0.5 * q
    }
}

/// ln Σ_i exp(x_i) with max shift. An all-(−∞) input returns −∞.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Π(Σ, T) = ½ (tr(Σ⁻¹T) − ln det T + ln det Σ − m), the shrinkage
/// penalty. Zero when Σ == T, positive otherwise.
pub fn kl_penalty(sigma: &SymMatrix, target: &SymMatrix) -> Result<f64, LinalgError> {
    if sigma.dim() != target.dim() {
        return Err(LinalgError::Dimension {
            expected: sigma.dim(),
            got: target.dim(),
        });
    }
    let chol_s = CholeskyFactor::factor(sigma)?;
    let chol_t = CholeskyFactor::factor(target)?;
    let m = sigma.dim() as f64;
    Ok(0.5 * (chol_s.trace_solve(target)? - chol_t.log_det() + chol_s.log_det() - m))
}

/// Mixture log-likelihood of `x` minus the weighted penalties of `reg`.
/// `reg = None` (or every η_k = 0) gives the plain log-likelihood.
pub fn penalized_log_likelihood(
    x: &Array2<f64>,
    params: &MixtureParams,
    reg: Option<&RegularizationState>,
) -> Result<f64, ModelError> {
    let pre = Precomputed::build(params)?;
    let k = params.component_count();
    let dim = params.dim();
    let mut scratch = vec![0.0; dim];
    let mut terms = vec![0.0; k];
    let mut ll = 0.0;
    for row in x.rows() {
        for (j, term) in terms.iter_mut().enumerate() {
            let mean = &params.means[j];
            for d in 0..dim {
                scratch[d] = row[d] - mean[d];
            }
            *term = pre.ln_weights[j] + pre.log_density_in_place(j, &mut scratch);
        }
        ll += logsumexp(&terms);
    }
    if let Some(reg) = reg {
        for j in 0..k {
            if reg.etas[j] == 0.0 {
                continue;
            }
            let pen = kl_penalty(&params.covariances[j], &reg.targets[j]).map_err(|source| {
                ModelError::IndefiniteCovariance { index: j, source }
            })?;
            ll -= reg.etas[j] * pen;
        }
    }
    Ok(ll)
}
