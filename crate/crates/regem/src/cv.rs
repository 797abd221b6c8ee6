//! Per-cluster L-fold cross-validation of the shrinkage strength η.
//!
//! For a cluster's index set D⁰ with target scale θ̂⁰, each candidate η
//! is scored by the Gaussian validation loss
//!
//! Err(η) = Σ_folds tr(Σ̂_η⁻¹ S_val) + ln det Σ̂_η
//!
//! where Σ̂_η = (|D_tr|/(η+|D_tr|))·Σ̂ + (η/(η+|D_tr|))·θ̂⁰I blends the
//! training-fold scatter with the scaled identity target. The smallest
//! finite total wins; exact ties go to the larger η.

use crate::linalg::{CholeskyFactor, SymMatrix};
use crate::rng::rng_from;
use ndarray::{Array1, Array2};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CvError {
    #[error("index set of {size} cannot fill {folds} folds with at least 2 training points")]
    InsufficientData { size: usize, folds: usize },
    #[error("all {candidates} candidates failed factorization")]
    AllCandidatesIndefinite { candidates: usize },
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid value {value} at position {index} is negative or not ascending")]
    MalformedGrid { index: usize, value: f64 },
    #[error("target scale must be positive, got {value}")]
    NonPositiveScale { value: f64 },
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub folds: usize,
    pub grid: Vec<f64>,
    pub seed: u64,
}

impl CvConfig {
    pub fn new(grid: Vec<f64>, seed: u64) -> Self {
        Self {
            folds: 5,
            grid,
            seed,
        }
    }
}

/// Outcome of one selection: the winning η, per-candidate totals,
/// the per-candidate per-fold breakdown, and how many candidates were
/// rejected as non-factorizable in at least one fold.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub chosen_eta: f64,
    pub candidate_errors: Vec<f64>,
    pub fold_errors: Vec<Vec<f64>>,
    pub rejected_candidates: usize,
}

/// Candidate grid {0} ∪ {cluster_size·10^g : g = −3, −2.5, …, +3},
/// 14 values. Scaled by the cluster size because the blend weight
/// depends on η only through η/|D_tr|.
pub fn default_grid(cluster_size: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    let size = cluster_size as f64;
    let mut g = -3.0;
    while g <= 3.0 + 1e-9 {
        grid.push(size * 10f64.powf(g));
        g += 0.5;
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn validate_grid(grid: &[f64]) -> Result<(), CvError> {
    if grid.is_empty() {
        return Err(CvError::EmptyGrid);
    }
    let mut prev = -1.0;
    for (index, &value) in grid.iter().enumerate() {
        if value < 0.0 || value <= prev || !value.is_finite() && value != f64::INFINITY {
            return Err(CvError::MalformedGrid { index, value });
        }
        prev = value;
    }
    Ok(())
}

/// Mean and scatter (normalized by the index count, centered on the
/// fold's own mean) of the rows of `x` selected by `idx`.
fn fold_moments(x: &Array2<f64>, idx: &[usize]) -> (Array1<f64>, SymMatrix) {
    let m = x.ncols();
    let count = idx.len() as f64;
    let mut mean = Array1::<f64>::zeros(m);
    for &i in idx {
        mean += &x.row(i);
    }
    mean /= count;
    let mut scatter: Array2<f64> = Array2::zeros((m, m));
    let mut diff = vec![0.0; m];
    for &i in idx {
        let row = x.row(i);
        for d in 0..m {
            diff[d] = row[d] - mean[d];
        }
        for a in 0..m {
            let scaled = diff[a] / count;
            let mut dst = scatter.row_mut(a);
            let dst = dst.as_slice_mut().expect("row-major layout");
            for b in a..m {
                dst[b] += scaled * diff[b];
            }
        }
    }
    for a in 0..m {
        for b in (a + 1)..m {
            scatter[[b, a]] = scatter[[a, b]];
        }
    }
    (
        mean,
        SymMatrix::from_array(scatter).expect("square by construction"),
    )
}

/// Shuffled near-equal contiguous folds: the first `len % folds` folds
/// take one extra element.
fn make_folds(d0: &[usize], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut shuffled = d0.to_vec();
    let mut rng = rng_from(seed);
    for i in (1..shuffled.len()).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    let base = shuffled.len() / folds;
    let extra = shuffled.len() % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(shuffled[start..start + size].to_vec());
        start += size;
    }
    out
}

/// Selects η for one cluster by L-fold cross-validation over `cfg.grid`.
///
/// A candidate whose blended covariance fails to factor in some fold
/// receives an infinite total (possible only for η = 0 with fewer
/// training points than dimensions); if that happens to every candidate
/// the selection fails.
pub fn select_eta(
    x: &Array2<f64>,
    d0: &[usize],
    theta0: f64,
    cfg: &CvConfig,
) -> Result<CvReport, CvError> {
    validate_grid(&cfg.grid)?;
    if !(theta0 > 0.0) {
        return Err(CvError::NonPositiveScale { value: theta0 });
    }
    if d0.len() < cfg.folds || d0.len() / cfg.folds < 2 {
        return Err(CvError::InsufficientData {
            size: d0.len(),
            folds: cfg.folds,
        });
    }
    let m = x.ncols();
    let folds = make_folds(d0, cfg.folds, cfg.seed);
    let j = cfg.grid.len();
    let mut fold_errors = vec![vec![0.0; cfg.folds]; j];
    let mut train = Vec::with_capacity(d0.len());
    for (f, val_fold) in folds.iter().enumerate() {
        train.clear();
        for (other, fold) in folds.iter().enumerate() {
            if other != f {
                train.extend_from_slice(fold);
            }
        }
        let (_, s_val) = fold_moments(x, val_fold);
        let (_, sigma_tr) = fold_moments(x, &train);
        let n_tr = train.len() as f64;
        for (c, &eta) in cfg.grid.iter().enumerate() {
            let beta = n_tr / (eta + n_tr);
            let mut blended = sigma_tr.as_array() * beta;
            let shift = (1.0 - beta) * theta0;
            for d in 0..m {
                blended[[d, d]] += shift;
            }
            let blended = SymMatrix::from_array(blended).expect("square by construction");
            fold_errors[c][f] = match CholeskyFactor::factor(&blended) {
                Ok(chol) => {
                    chol.trace_solve(&s_val).expect("dimensions agree") + chol.log_det()
                }
                Err(_) => f64::INFINITY,
            };
        }
    }
    let mut candidate_errors = vec![0.0; j];
    let mut rejected_candidates = 0;
    for c in 0..j {
        let total: f64 = fold_errors[c].iter().sum();
        candidate_errors[c] = total;
        if total == f64::INFINITY {
            rejected_candidates += 1;
        }
    }
    let mut chosen = None;
    let mut best = f64::INFINITY;
    for (c, &err) in candidate_errors.iter().enumerate() {
        // <= prefers the larger η among exact ties.
        if err.is_finite() && err <= best {
            best = err;
            chosen = Some(c);
        }
    }
    match chosen {
        Some(c) => Ok(CvReport {
            chosen_eta: cfg.grid[c],
            candidate_errors,
            fold_errors,
            rejected_candidates,
        }),
        None => Err(CvError::AllCandidatesIndefinite { candidates: j }),
    }
}
