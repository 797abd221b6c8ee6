//! Lloyd's K-means with k-means++ seeding and best-of-n restarts.
//!
//! Serves both as the baseline clustering method and as the initializer
//! for the mixture fits: [`init_from_kmeans`] turns a hard clustering
//! into mixture parameters, per-cluster identity-target scales, and the
//! cluster index sets consumed by shrinkage selection.

use crate::linalg::{CholeskyFactor, LinalgError, SymMatrix};
use crate::model::{MixtureParams, RegularizationState};
use crate::rng::rng_from;
use ndarray::{Array1, Array2};
use rand::Rng;
use std::collections::HashSet;
use thiserror::Error;

/// Ridge added to an initial within-cluster covariance that fails to
/// factor. Matches the classical variant's default ε.
const INIT_RIDGE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum KmeansError {
    #[error("need at least {required} distinct rows, found {distinct}")]
    DegenerateData { distinct: usize, required: usize },
    #[error("cluster {cluster} has {size} points, need at least 2")]
    DegenerateCluster { cluster: usize, size: usize },
    #[error("cluster {cluster} covariance failed to factor after ridge repair")]
    IndefiniteInit {
        cluster: usize,
        #[source]
        source: LinalgError,
    },
}

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            n_init: 10,
            max_iter: 200,
            tol: 1e-4,
            seed,
        }
    }
}

/// A hard partition: per-point labels, the centroid matrix, the final
/// within-cluster sum of squares, and the Lloyd iterations of the
/// winning restart.
#[derive(Debug, Clone)]
pub struct HardClustering {
    pub labels: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia: f64,
    pub iterations: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn distinct_rows(x: &Array2<f64>) -> usize {
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(x.nrows());
    for row in x.rows() {
        seen.insert(row.iter().map(|v| v.to_bits()).collect());
    }
    seen.len()
}

/// k-means++ seeding with the greedy local-trial refinement used by the
/// reference baseline: each new centroid is drawn from 2 + ⌊ln K⌋
/// distance-weighted candidates and the one minimizing the resulting
/// potential wins.
fn plus_plus_seed<R: Rng>(x: &Array2<f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let (n, m) = x.dim();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut centroids = Array2::zeros((k, m));
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).assign(&x.row(first));
    let first_row = x.row(first);
    let first_row = first_row.as_slice().expect("row-major layout");
    let mut dist2: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|r| squared_distance(r.as_slice().expect("row-major layout"), first_row))
        .collect();
    let mut cand_dist2 = vec![0.0; n];
    let mut best_dist2 = vec![0.0; n];
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let mut best_index = usize::MAX;
        let mut best_pot = f64::INFINITY;
        for _ in 0..trials {
            let index = if total > 0.0 {
                let r = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut picked = n - 1;
                for (i, &d) in dist2.iter().enumerate() {
                    acc += d;
                    if acc > r {
                        picked = i;
                        break;
                    }
                }
                picked
            } else {
                rng.gen_range(0..n)
            };
            let cand_row = x.row(index);
            let cand_row = cand_row.as_slice().expect("row-major layout");
            let mut pot = 0.0;
            for (i, row) in x.rows().into_iter().enumerate() {
                let d = squared_distance(row.as_slice().expect("row-major layout"), cand_row)
                    .min(dist2[i]);
                cand_dist2[i] = d;
                pot += d;
            }
            if pot < best_pot {
                best_pot = pot;
                best_index = index;
                best_dist2.copy_from_slice(&cand_dist2);
            }
        }
        centroids.row_mut(c).assign(&x.row(best_index));
        dist2.copy_from_slice(&best_dist2);
    }
    centroids
}

/// Nearest-centroid labels for `x` (ties to the lowest index).
pub fn nearest_labels(x: &Array2<f64>, centroids: &Array2<f64>) -> Vec<usize> {
    let n = x.nrows();
    let mut labels = vec![0usize; n];
    let mut dist2 = vec![0.0; n];
    assign(x, centroids, &mut labels, &mut dist2);
    labels
}

/// Assigns every point to its nearest centroid (ties to the lowest
/// index), filling `labels` and per-point squared distances. Returns the
/// total inertia.
fn assign(x: &Array2<f64>, centroids: &Array2<f64>, labels: &mut [usize], dist2: &mut [f64]) -> f64 {
    let k = centroids.nrows();
    let mut inertia = 0.0;
    for (i, row) in x.rows().into_iter().enumerate() {
        let row = row.as_slice().expect("row-major layout");
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let cen = centroids.row(c);
            let d = squared_distance(row, cen.as_slice().expect("row-major layout"));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels[i] = best;
        dist2[i] = best_d;
        inertia += best_d;
    }
    inertia
}

fn lloyd(x: &Array2<f64>, mut centroids: Array2<f64>, max_iter: usize, tol: f64) -> HardClustering {
    let (n, m) = x.dim();
    let k = centroids.nrows();
    let mut labels = vec![0usize; n];
    let mut dist2 = vec![0.0; n];
    let mut prev_inertia = f64::INFINITY;
    let mut iterations = 0;
    for iter in 1..=max_iter {
        iterations = iter;
        let inertia = assign(x, &centroids, &mut labels, &mut dist2);
        debug_assert!(
            inertia <= prev_inertia * (1.0 + 1e-9) + 1e-12,
            "inertia increased: {prev_inertia} -> {inertia}"
        );
        prev_inertia = inertia;
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        // An empty cluster steals the point farthest from its current
        // centroid; the point cannot be stolen twice.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far = usize::MAX;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[labels[i]] > 1 && dist2[i] > far_d {
                    far_d = dist2[i];
                    far = i;
                }
            }
            if far == usize::MAX {
                continue;
            }
            counts[labels[far]] -= 1;
            labels[far] = c;
            counts[c] = 1;
            dist2[far] = 0.0;
        }
        let mut new_centroids: Array2<f64> = Array2::zeros((k, m));
        for (i, row) in x.rows().into_iter().enumerate() {
            let mut dst = new_centroids.row_mut(labels[i]);
            dst += &row;
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mut row = new_centroids.row_mut(c);
                row /= counts[c] as f64;
            } else {
                new_centroids.row_mut(c).assign(&centroids.row(c));
            }
        }
        let mut shift2 = 0.0;
        for c in 0..k {
            for d in 0..m {
                let delta = new_centroids[[c, d]] - centroids[[c, d]];
                shift2 += delta * delta;
            }
        }
        centroids = new_centroids;
        if shift2.sqrt() < tol {
            break;
        }
    }
    let inertia = assign(x, &centroids, &mut labels, &mut dist2);
    HardClustering {
        labels,
        centroids,
        inertia,
        iterations,
    }
}

/// Best-of-`n_init` restarts by inertia. Every restart draws its k-means++
/// seeds from the same sequential stream, so the result is a pure
/// function of (X, cfg).
pub fn kmeans_fit(x: &Array2<f64>, cfg: &KMeansConfig) -> Result<HardClustering, KmeansError> {
    let distinct = distinct_rows(x);
    if distinct < cfg.k {
        return Err(KmeansError::DegenerateData {
            distinct,
            required: cfg.k,
        });
    }
    let mut rng = rng_from(cfg.seed);
    let mut best: Option<HardClustering> = None;
    for _ in 0..cfg.n_init.max(1) {
        let seeds = plus_plus_seed(x, cfg.k, &mut rng);
        let hc = lloyd(x, seeds, cfg.max_iter, cfg.tol);
        if best.as_ref().map_or(true, |b| hc.inertia < b.inertia) {
            best = Some(hc);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

/// Turns a hard clustering into mixture-fit starting state:
/// π_k = |D_k|/n, μ_k = cluster mean, Σ̂_k = within-cluster sample
/// covariance (ridged when it fails to factor), θ̂_k = tr(Σ̂_k)/m with
/// T_k = θ̂_k·I, η_k = 0 pending selection, plus the index sets D_k.
pub fn init_from_kmeans(
    x: &Array2<f64>,
    hc: &HardClustering,
) -> Result<(MixtureParams, RegularizationState, Vec<Vec<usize>>), KmeansError> {
    let (n, m) = x.dim();
    let k = hc.centroids.nrows();
    let mut index_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in hc.labels.iter().enumerate() {
        index_sets[l].push(i);
    }
    for (cluster, set) in index_sets.iter().enumerate() {
        if set.len() < 2 {
            return Err(KmeansError::DegenerateCluster {
                cluster,
                size: set.len(),
            });
        }
    }
    let mut weights = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    let mut covariances = Vec::with_capacity(k);
    let mut scales = Vec::with_capacity(k);
    for set in &index_sets {
        let count = set.len() as f64;
        weights.push(count / n as f64);
        let mut mean = Array1::<f64>::zeros(m);
        for &i in set {
            mean += &x.row(i);
        }
        mean /= count;
        let mut scatter: Array2<f64> = Array2::zeros((m, m));
        let mut diff = vec![0.0; m];
        for &i in set {
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
        let mut cov = SymMatrix::from_array(scatter).expect("square by construction");
        if CholeskyFactor::factor(&cov).is_err() {
            let mut ridged = cov.as_array().clone();
            for d in 0..m {
                ridged[[d, d]] += INIT_RIDGE;
            }
            cov = SymMatrix::from_array(ridged).expect("square by construction");
        }
        scales.push(cov.trace() / m as f64);
        covariances.push(cov);
        means.push(mean);
    }
    for (cluster, cov) in covariances.iter().enumerate() {
        if let Err(source) = CholeskyFactor::factor(cov) {
            return Err(KmeansError::IndefiniteInit { cluster, source });
        }
    }
    let params = MixtureParams {
        weights,
        means,
        covariances,
    };
    let reg = RegularizationState::identity_targets(scales, vec![0.0; k], m);
    Ok((params, reg, index_sets))
}
