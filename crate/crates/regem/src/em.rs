//! Expectation-maximization engine: shared E-step, classical M-step with
//! an εI ridge, regularized M-step shrinking each covariance toward a
//! scaled identity target, periodic target/strength refresh, convergence
//! control.
//!
//! Both variants share one accumulation kernel with fixed-order
//! sequential reductions. The η = 0 regularized path and the ε = 0
//! classical path leave the weighted scatter untouched, so they produce
//! bitwise-identical parameter sequences from identical initialization.

use crate::cv::{default_grid, select_eta, CvConfig, CvError};
use crate::linalg::{eig_extremes, LinalgError, SymMatrix};
use crate::metrics::{conditioning_report, ClusterConditioning};
use crate::model::{
    logsumexp, penalized_log_likelihood, MixtureParams, ModelError, Precomputed,
    RegularizationState,
};
use crate::rng::mix_seed;
use ndarray::{Array1, Array2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmError {
    #[error("cluster {cluster} soft count {count:e} fell below the floor {threshold:e}")]
    EmptyCluster {
        cluster: usize,
        count: f64,
        threshold: f64,
    },
    #[error("covariance of cluster {cluster} is not positive definite")]
    Indefinite {
        cluster: usize,
        #[source]
        source: LinalgError,
    },
    #[error("initialization is inconsistent")]
    InvalidInit {
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Cv(#[from] CvError),
}

fn model_to_em(e: ModelError) -> EmError {
    match e {
        ModelError::IndefiniteCovariance { index, source } => EmError::Indefinite {
            cluster: index,
            source,
        },
        // Parameters built inside the fit loop satisfy every other
        // validity condition by construction.
        other => EmError::InvalidInit { source: other },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmVariant {
    Classical,
    Regularized,
}

#[derive(Debug, Clone)]
pub struct EmConfig {
    pub variant: EmVariant,
    pub max_iter: usize,
    /// Diagonal ridge, classical variant only.
    pub eps: f64,
    /// Iterations between target/strength refreshes, regularized only.
    pub refresh_period: usize,
    /// Relative objective change that stops the loop early; 0 disables
    /// the early stop and the full `max_iter` iterations run.
    pub rel_tol: f64,
    /// Soft-count floor as a fraction of n; `None` means 1/(2n).
    pub min_weight_floor: Option<f64>,
    /// Record per-cluster spectral floors after every M-step.
    pub track_spectral_floor: bool,
}

impl EmConfig {
    pub fn classical() -> Self {
        Self {
            variant: EmVariant::Classical,
            max_iter: 40,
            eps: 1e-4,
            refresh_period: 10,
            rel_tol: 1e-6,
            min_weight_floor: None,
            track_spectral_floor: false,
        }
    }

    pub fn regularized() -> Self {
        Self {
            variant: EmVariant::Regularized,
            ..Self::classical()
        }
    }
}

/// Shrinkage-selection policy for the regularized variant: fold count,
/// optional explicit candidate grid (each cluster gets
/// [`default_grid`] of its index-set size otherwise), and the seed all
/// per-event fold shuffles derive from.
#[derive(Debug, Clone)]
pub struct CvPolicy {
    pub folds: usize,
    pub grid: Option<Vec<f64>>,
    pub seed: u64,
}

impl CvPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            folds: 5,
            grid: None,
            seed,
        }
    }
}

/// Starting state for a fit, normally produced by
/// `kmeans::init_from_kmeans`.
#[derive(Debug, Clone)]
pub struct EmInit {
    pub params: MixtureParams,
    pub reg: RegularizationState,
    pub index_sets: Vec<Vec<usize>>,
}

impl From<(MixtureParams, RegularizationState, Vec<Vec<usize>>)> for EmInit {
    fn from(t: (MixtureParams, RegularizationState, Vec<Vec<usize>>)) -> Self {
        Self {
            params: t.0,
            reg: t.1,
            index_sets: t.2,
        }
    }
}

/// Row-stochastic posterior cluster probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    pub p: Array2<f64>,
}

impl Responsibilities {
    /// Argmax per row, ties to the lowest cluster index.
    pub fn hard_labels(&self) -> Vec<usize> {
        self.p
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                let mut best_v = f64::NEG_INFINITY;
                for (j, &v) in row.iter().enumerate() {
                    if v > best_v {
                        best_v = v;
                        best = j;
                    }
                }
                best
            })
            .collect()
    }
}

/// Posterior responsibilities p_ik ∝ π_k N(x_i; μ_k, Σ_k), computed in
/// the log domain with a per-row max shift.
pub fn e_step(x: &Array2<f64>, params: &MixtureParams) -> Result<Responsibilities, EmError> {
    let pre = Precomputed::build(params).map_err(model_to_em)?;
    let (n, dim) = x.dim();
    let k = params.component_count();
    let mut p = Array2::zeros((n, k));
    let mut scratch = vec![0.0; dim];
    let mut terms = vec![0.0; k];
    for (i, row) in x.rows().into_iter().enumerate() {
        let row = row.as_slice().expect("row-major layout");
        for (j, term) in terms.iter_mut().enumerate() {
            let mean = params.means[j].as_slice().expect("contiguous");
            for d in 0..dim {
                scratch[d] = row[d] - mean[d];
            }
            *term = pre.ln_weights[j] + pre.log_density_in_place(j, &mut scratch);
        }
        let lse = logsumexp(&terms);
        for j in 0..k {
            p[[i, j]] = (terms[j] - lse).exp();
        }
    }
    Ok(Responsibilities { p })
}

enum Finalize<'a> {
    Classical { eps: f64 },
    Regularized { reg: &'a RegularizationState },
}

struct MStepOutcome {
    params: MixtureParams,
    betas: Vec<f64>,
    floored: Vec<usize>,
}

/// Shared accumulation for both M-step variants: soft counts, weights,
/// fresh means, weighted scatters around the fresh means, then the
/// variant's covariance finalization. `previous = None` errors on an
/// under-floor cluster; `Some` keeps that cluster's previous (μ, Σ),
/// floors its weight, and renormalizes the weight vector.
fn m_step_core(
    x: &Array2<f64>,
    p: &Responsibilities,
    finalize: Finalize,
    floor: f64,
    previous: Option<&MixtureParams>,
) -> Result<MStepOutcome, EmError> {
    let (n, dim) = x.dim();
    let k = p.p.ncols();
    let mut counts = vec![0.0; k];
    for i in 0..n {
        for (j, c) in counts.iter_mut().enumerate() {
            *c += p.p[[i, j]];
        }
    }
    let threshold = n as f64 * floor;
    let mut floored = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        if c < threshold {
            match previous {
                None => {
                    return Err(EmError::EmptyCluster {
                        cluster: j,
                        count: c,
                        threshold,
                    })
                }
                Some(_) => floored.push(j),
            }
        }
    }
    let mut weights: Vec<f64> = counts.iter().map(|&c| c / n as f64).collect();
    let mut means: Vec<Array1<f64>> = Vec::with_capacity(k);
    let mut covariances: Vec<SymMatrix> = Vec::with_capacity(k);
    let mut betas = vec![1.0; k];
    let mut diff = vec![0.0; dim];
    for j in 0..k {
        if floored.contains(&j) {
            let prev = previous.expect("floored implies previous");
            means.push(prev.means[j].clone());
            covariances.push(prev.covariances[j].clone());
            weights[j] = floor;
            continue;
        }
        let nk = counts[j];
        let mut mean = vec![0.0; dim];
        for (i, row) in x.rows().into_iter().enumerate() {
            let w = p.p[[i, j]] / nk;
            let row = row.as_slice().expect("row-major layout");
            for d in 0..dim {
                mean[d] += w * row[d];
            }
        }
        let mut scatter: Array2<f64> = Array2::zeros((dim, dim));
        for (i, row) in x.rows().into_iter().enumerate() {
            let w = p.p[[i, j]] / nk;
            let row = row.as_slice().expect("row-major layout");
            for d in 0..dim {
                diff[d] = row[d] - mean[d];
            }
            for a in 0..dim {
                let scaled = w * diff[a];
                let mut dst = scatter.row_mut(a);
                let dst = dst.as_slice_mut().expect("row-major layout");
                for b in a..dim {
                    dst[b] += scaled * diff[b];
                }
            }
        }
        for a in 0..dim {
            for b in (a + 1)..dim {
                scatter[[b, a]] = scatter[[a, b]];
            }
        }
        match finalize {
            Finalize::Classical { eps } => {
                if eps != 0.0 {
                    for d in 0..dim {
                        scatter[[d, d]] += eps;
                    }
                }
            }
            Finalize::Regularized { reg } => {
                let eta = reg.etas[j];
                if eta != 0.0 {
                    let beta = nk / (eta + nk);
                    betas[j] = beta;
                    scatter *= beta;
                    let shift = (1.0 - beta) * reg.scales[j];
                    for d in 0..dim {
                        scatter[[d, d]] += shift;
                    }
                }
            }
        }
        means.push(Array1::from(mean));
        covariances.push(SymMatrix::from_array(scatter).expect("square by construction"));
    }
    if !floored.is_empty() {
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    Ok(MStepOutcome {
        params: MixtureParams {
            weights,
            means,
            covariances,
        },
        betas,
        floored,
    })
}

/// Classical M-step: moment updates plus an εI diagonal ridge.
/// Errors when a soft count falls below n·`min_weight_floor`.
pub fn m_step_classical(
    x: &Array2<f64>,
    p: &Responsibilities,
    eps: f64,
    min_weight_floor: f64,
) -> Result<MixtureParams, EmError> {
    m_step_core(x, p, Finalize::Classical { eps }, min_weight_floor, None).map(|o| o.params)
}

/// Regularized M-step: Σ_k = β_k·scatter + (1−β_k)·T_k with
/// β_k = nπ_k/(η_k + nπ_k). Errors when a soft count falls below
/// n·`min_weight_floor`.
pub fn m_step_regularized(
    x: &Array2<f64>,
    p: &Responsibilities,
    reg: &RegularizationState,
    min_weight_floor: f64,
) -> Result<MixtureParams, EmError> {
    m_step_core(x, p, Finalize::Regularized { reg }, min_weight_floor, None).map(|o| o.params)
}

/// Spectral floor record for one cluster after one M-step: the smallest
/// eigenvalue and the bound implied by the update form.
#[derive(Debug, Clone)]
pub struct SpectralCheck {
    pub cluster: usize,
    pub min_eig: f64,
    pub floor: f64,
}

#[derive(Debug, Clone)]
pub struct IterationStat {
    pub iteration: usize,
    pub penalized_ll: f64,
    /// Targets or strengths changed at the start of this iteration, so
    /// the objective is not comparable with the previous one.
    pub refresh: bool,
    /// Clusters whose previous parameters were kept this M-step.
    pub floored: Vec<usize>,
    pub betas: Vec<f64>,
    pub etas: Vec<f64>,
    pub scales: Vec<f64>,
    pub spectral: Option<Vec<SpectralCheck>>,
}

/// How a cluster's η was produced at one selection event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvFallback {
    /// Selection ran and chose from the grid.
    None,
    /// Too little data at initialization: the grid maximum was taken.
    GridMax,
    /// Too little data at a refresh: the previous η was kept.
    KeptPrevious,
}

#[derive(Debug, Clone)]
pub struct CvEvent {
    /// 0 for the initial selection, otherwise the refresh iteration.
    pub iteration: usize,
    pub cluster: usize,
    pub eta: f64,
    pub fallback: CvFallback,
}

#[derive(Debug, Clone)]
pub struct EmFitResult {
    pub params: MixtureParams,
    pub resp: Responsibilities,
    pub hard_labels: Vec<usize>,
    pub iterations_run: usize,
    pub trace: Vec<IterationStat>,
    /// Final shrinkage state; `None` for the classical variant.
    pub reg: Option<RegularizationState>,
    pub cv_events: Vec<CvEvent>,
    pub conditioning: Vec<ClusterConditioning>,
}

impl EmFitResult {
    pub fn penalized_ll_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|s| s.penalized_ll).collect()
    }

    /// Final η per cluster; empty for the classical variant.
    pub fn etas(&self) -> Vec<f64> {
        self.reg.as_ref().map(|r| r.etas.clone()).unwrap_or_default()
    }
}

fn resolve_grid(policy: &CvPolicy, cluster_size: usize) -> Vec<f64> {
    policy
        .grid
        .clone()
        .unwrap_or_else(|| default_grid(cluster_size))
}

/// Alternates E- and M-steps from `init` until the relative objective
/// change drops below `cfg.rel_tol` or `cfg.max_iter` is reached.
///
/// For the regularized variant with a selection policy, η_k is chosen
/// per cluster before the first iteration, and every
/// `cfg.refresh_period` iterations the hard index sets, target scales
/// θ̂_k = tr(Σ̂_k)/m, and strengths are refreshed. A cluster too small
/// to cross-validate takes the grid maximum at initialization (heaviest
/// shrinkage) and keeps its previous η at a refresh. With `cv = None`
/// the initial η values are frozen for the whole run and no refresh
/// happens.
pub fn fit(
    x: &Array2<f64>,
    init: &EmInit,
    cfg: &EmConfig,
    cv: Option<&CvPolicy>,
) -> Result<EmFitResult, EmError> {
    init.params
        .validate()
        .map_err(|source| EmError::InvalidInit { source })?;
    let (n, dim) = x.dim();
    let k = init.params.component_count();
    let floor = cfg.min_weight_floor.unwrap_or(0.5 / n as f64);
    let mut params = init.params.clone();
    let mut reg = init.reg.clone();
    let mut cv_events = Vec::new();
    let regularized = cfg.variant == EmVariant::Regularized;
    let mut event_index: u64 = 0;
    if regularized {
        if let Some(policy) = cv {
            let event_seed = mix_seed(policy.seed, event_index);
            for (cluster, set) in init.index_sets.iter().enumerate() {
                let grid = resolve_grid(policy, set.len());
                let cv_cfg = CvConfig {
                    folds: policy.folds,
                    grid: grid.clone(),
                    seed: mix_seed(event_seed, cluster as u64),
                };
                match select_eta(x, set, reg.scales[cluster], &cv_cfg) {
                    Ok(report) => {
                        reg.etas[cluster] = report.chosen_eta;
                        cv_events.push(CvEvent {
                            iteration: 0,
                            cluster,
                            eta: report.chosen_eta,
                            fallback: CvFallback::None,
                        });
                    }
                    Err(CvError::InsufficientData { .. }) => {
                        let max = *grid.last().expect("grid validated nonempty");
                        reg.etas[cluster] = max;
                        cv_events.push(CvEvent {
                            iteration: 0,
                            cluster,
                            eta: max,
                            fallback: CvFallback::GridMax,
                        });
                    }
                    Err(other) => return Err(other.into()),
                }
            }
            event_index += 1;
        }
    }
    let mut trace: Vec<IterationStat> = Vec::with_capacity(cfg.max_iter);
    let mut prev_ll = f64::NAN;
    for t in 1..=cfg.max_iter {
        let resp = e_step(x, &params)?;
        let mut refresh = false;
        if regularized && cv.is_some() && t > 1 && (t - 1) % cfg.refresh_period == 0 {
            refresh = true;
            let policy = cv.expect("checked is_some");
            let hard = resp.hard_labels();
            let mut sets: Vec<Vec<usize>> = vec![Vec::new(); k];
            for (i, &l) in hard.iter().enumerate() {
                sets[l].push(i);
            }
            for cluster in 0..k {
                let scale = params.covariances[cluster].trace() / dim as f64;
                reg.set_scale(cluster, scale, dim);
            }
            let event_seed = mix_seed(policy.seed, event_index);
            for (cluster, set) in sets.iter().enumerate() {
                let grid = resolve_grid(policy, set.len());
                let cv_cfg = CvConfig {
                    folds: policy.folds,
                    grid,
                    seed: mix_seed(event_seed, cluster as u64),
                };
                match select_eta(x, set, reg.scales[cluster], &cv_cfg) {
                    Ok(report) => {
                        reg.etas[cluster] = report.chosen_eta;
                        cv_events.push(CvEvent {
                            iteration: t,
                            cluster,
                            eta: report.chosen_eta,
                            fallback: CvFallback::None,
                        });
                    }
                    Err(CvError::InsufficientData { .. }) => {
                        cv_events.push(CvEvent {
                            iteration: t,
                            cluster,
                            eta: reg.etas[cluster],
                            fallback: CvFallback::KeptPrevious,
                        });
                    }
                    Err(other) => return Err(other.into()),
                }
            }
            event_index += 1;
        }
        let finalize = if regularized {
            Finalize::Regularized { reg: &reg }
        } else {
            Finalize::Classical { eps: cfg.eps }
        };
        let outcome = m_step_core(x, &resp, finalize, floor, Some(&params))?;
        params = outcome.params;
        let reg_ref = regularized.then_some(&reg);
        let ll = penalized_log_likelihood(x, &params, reg_ref).map_err(model_to_em)?;
        let spectral = cfg.track_spectral_floor.then(|| {
            (0..k)
                .map(|cluster| {
                    let (min_eig, _) = eig_extremes(&params.covariances[cluster]);
                    let floor_bound = if regularized {
                        (1.0 - outcome.betas[cluster]) * reg.scales[cluster]
                    } else {
                        cfg.eps
                    };
                    SpectralCheck {
                        cluster,
                        min_eig,
                        floor: floor_bound,
                    }
                })
                .collect()
        });
        trace.push(IterationStat {
            iteration: t,
            penalized_ll: ll,
            refresh,
            floored: outcome.floored,
            betas: outcome.betas,
            etas: if regularized { reg.etas.clone() } else { Vec::new() },
            scales: if regularized { reg.scales.clone() } else { Vec::new() },
            spectral,
        });
        let converged = cfg.rel_tol > 0.0
            && t > 1
            && !refresh
            && (ll - prev_ll).abs() <= cfg.rel_tol * prev_ll.abs();
        prev_ll = ll;
        if converged {
            break;
        }
    }
    let resp = e_step(x, &params)?;
    let hard_labels = resp.hard_labels();
    let conditioning = conditioning_report(&params);
    Ok(EmFitResult {
        iterations_run: trace.len(),
        params,
        resp,
        hard_labels,
        trace,
        reg: regularized.then_some(reg),
        cv_events,
        conditioning,
    })
}
