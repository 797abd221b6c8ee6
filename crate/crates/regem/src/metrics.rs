//! Evaluation: permutation-maximized clustering accuracy and covariance
//! conditioning diagnostics.

use crate::linalg::eig_extremes;
use crate::model::MixtureParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("label vectors have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("label {value} out of range for {k} classes")]
    LabelOutOfRange { value: usize, k: usize },
    #[error("no labels to score")]
    Empty,
}

/// K×K counts, rows indexed by true class, columns by predicted cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
    total: usize,
}

impl ConfusionMatrix {
    pub fn build(
        true_labels: &[usize],
        predicted: &[usize],
        k: usize,
    ) -> Result<Self, MetricsError> {
        if true_labels.len() != predicted.len() {
            return Err(MetricsError::LengthMismatch {
                left: true_labels.len(),
                right: predicted.len(),
            });
        }
        if true_labels.is_empty() || k == 0 {
            return Err(MetricsError::Empty);
        }
        let mut counts = vec![vec![0usize; k]; k];
        for (&t, &p) in true_labels.iter().zip(predicted) {
            if t >= k {
                return Err(MetricsError::LabelOutOfRange { value: t, k });
            }
            if p >= k {
                return Err(MetricsError::LabelOutOfRange { value: p, k });
            }
            counts[t][p] += 1;
        }
        Ok(Self {
            counts,
            total: true_labels.len(),
        })
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }
}

fn diagonal_sum(c: &ConfusionMatrix, perm: &[usize]) -> usize {
    perm.iter()
        .enumerate()
        .map(|(row, &col)| c.counts[row][col])
        .sum()
}

/// Advances `perm` to the next lexicographic permutation; false at the
/// last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Exact search over all K! column permutations in lexicographic order;
/// the first maximizer wins.
pub fn best_permutation_brute(c: &ConfusionMatrix) -> (usize, Vec<usize>) {
    let k = c.k();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = diagonal_sum(c, &perm);
    let mut best_perm = perm.clone();
    while next_permutation(&mut perm) {
        let s = diagonal_sum(c, &perm);
        if s > best {
            best = s;
            best_perm = perm.clone();
        }
    }
    (best, best_perm)
}

/// O(K³) optimal assignment on the negated counts (potential/augmenting
/// path form).
pub fn best_permutation_assignment(c: &ConfusionMatrix) -> (usize, Vec<usize>) {
    let n = c.k();
    let max_entry = c
        .counts
        .iter()
        .flat_map(|row| row.iter())
        .copied()
        .max()
        .unwrap_or(0) as i64;
    let cost =
        |row: usize, col: usize| -> i64 { max_entry - c.counts[row][col] as i64 };
    let inf = i64::MAX / 2;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[matched_row[j] - 1] = j - 1;
    }
    (diagonal_sum(c, &perm), perm)
}

/// Best-case agreement after optimally relabeling predicted clusters:
/// max over permutations σ of Σ_k C[k, σ(k)] / n. Exhaustive search for
/// K ≤ 8, optimal assignment beyond. Returns the accuracy and σ.
pub fn clustering_accuracy(
    true_labels: &[usize],
    predicted: &[usize],
    k: usize,
) -> Result<(f64, Vec<usize>), MetricsError> {
    let c = ConfusionMatrix::build(true_labels, predicted, k)?;
    let (hits, perm) = if k <= 8 {
        best_permutation_brute(&c)
    } else {
        best_permutation_assignment(&c)
    };
    Ok((hits as f64 / c.total() as f64, perm))
}

/// Extreme eigenvalues and condition number per cluster covariance;
/// condition is +∞ when the smallest eigenvalue is not positive.
#[derive(Debug, Clone)]
pub struct ClusterConditioning {
    pub min_eig: f64,
    pub max_eig: f64,
    pub condition: f64,
}

pub fn conditioning_report(params: &MixtureParams) -> Vec<ClusterConditioning> {
    params
        .covariances
        .iter()
        .map(|cov| {
            let (min_eig, max_eig) = eig_extremes(cov);
            let condition = if min_eig <= 0.0 {
                f64::INFINITY
            } else {
                max_eig / min_eig
            };
            ClusterConditioning {
                min_eig,
                max_eig,
                condition,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::rng::rng_from;
    use ndarray::{array, Array2};
    use rand::Rng;

    #[test]
    fn confusion_matrix_counts_and_total() {
        let c = ConfusionMatrix::build(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(c.total(), 4);
        assert_eq!(c.counts()[0], vec![1, 1]);
        assert_eq!(c.counts()[1], vec![0, 2]);
    }

    #[test]
    fn perfect_prediction_scores_one_with_identity() {
        let labels = vec![0, 1, 2, 0, 1, 2];
        let (acc, perm) = clustering_accuracy(&labels, &labels, 3).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(perm, vec![0, 1, 2]);
    }

    #[test]
    fn fixed_relabeling_scores_one() {
        let truth = vec![0, 1, 2, 0, 1, 2];
        let relabel = [2usize, 0, 1];
        let predicted: Vec<usize> = truth.iter().map(|&t| relabel[t]).collect();
        let (acc, perm) = clustering_accuracy(&truth, &predicted, 3).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(perm, vec![2, 0, 1]);
    }

    #[test]
    fn frozen_five_sixths_instance() {
        // Confusion [[1,1,0],[0,2,0],[0,0,2]]: identity keeps 5 of 6.
        let truth = vec![0, 0, 1, 1, 2, 2];
        let predicted = vec![0, 1, 1, 1, 2, 2];
        let (acc, perm) = clustering_accuracy(&truth, &predicted, 3).unwrap();
        assert!((acc - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(perm, vec![0, 1, 2]);
    }

    #[test]
    fn accuracy_is_invariant_under_relabeling() {
        let mut rng = rng_from(3);
        let k = 4;
        let truth: Vec<usize> = (0..120).map(|_| rng.gen_range(0..k)).collect();
        let predicted: Vec<usize> = (0..120).map(|_| rng.gen_range(0..k)).collect();
        let (base, _) = clustering_accuracy(&truth, &predicted, k).unwrap();
        let mut relabel: Vec<usize> = (0..k).collect();
        for _ in 0..10 {
            for i in (1..k).rev() {
                let j = rng.gen_range(0..=i);
                relabel.swap(i, j);
            }
            let remapped: Vec<usize> = predicted.iter().map(|&p| relabel[p]).collect();
            let (acc, _) = clustering_accuracy(&truth, &remapped, k).unwrap();
            assert_eq!(acc, base);
        }
    }

    #[test]
    fn constant_prediction_scores_the_majority_share() {
        let mut rng = rng_from(5);
        for _ in 0..20 {
            let k = 4;
            let n = 100;
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let constant = vec![0usize; n];
            let (acc, _) = clustering_accuracy(&truth, &constant, k).unwrap();
            let majority = (0..k)
                .map(|c| truth.iter().filter(|&&t| t == c).count())
                .max()
                .unwrap() as f64
                / n as f64;
            assert!((acc - majority).abs() < 1e-15, "acc {acc} vs {majority}");
        }
    }

    #[test]
    fn accuracy_never_falls_below_one_over_k() {
        // The maximum over permutations is at least the mean, and the
        // mean diagonal sum is n/K.
        let mut rng = rng_from(6);
        for _ in 0..20 {
            let k = 4;
            let n = 100;
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let predicted: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let (acc, _) = clustering_accuracy(&truth, &predicted, k).unwrap();
            assert!(acc >= 1.0 / k as f64 - 1e-15, "acc {acc}");
        }
    }

    #[test]
    fn brute_and_assignment_agree_on_500_instances() {
        let mut rng = rng_from(7);
        for trial in 0..500 {
            let k = rng.gen_range(2..=5);
            let n = 200;
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let predicted: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let c = ConfusionMatrix::build(&truth, &predicted, k).unwrap();
            let (brute, _) = best_permutation_brute(&c);
            let (assigned, perm) = best_permutation_assignment(&c);
            assert_eq!(brute, assigned, "trial {trial} k {k}");
            assert_eq!(diagonal_sum(&c, &perm), assigned);
        }
    }

    #[test]
    fn large_k_shifted_diagonal_recovered() {
        let k = 9;
        let truth: Vec<usize> = (0..180).map(|i| i % k).collect();
        let predicted: Vec<usize> = truth.iter().map(|&t| (t + 1) % k).collect();
        let (acc, perm) = clustering_accuracy(&truth, &predicted, k).unwrap();
        assert_eq!(acc, 1.0);
        for (row, &col) in perm.iter().enumerate() {
            assert_eq!(col, (row + 1) % k);
        }
    }

    #[test]
    fn mismatched_lengths_error() {
        assert!(matches!(
            clustering_accuracy(&[0, 1], &[0], 2),
            Err(MetricsError::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn out_of_range_label_errors() {
        assert!(matches!(
            clustering_accuracy(&[0, 3], &[0, 1], 2),
            Err(MetricsError::LabelOutOfRange { value: 3, k: 2 })
        ));
    }

    fn single_component(cov: SymMatrix) -> MixtureParams {
        let dim = cov.dim();
        MixtureParams {
            weights: vec![1.0],
            means: vec![ndarray::Array1::zeros(dim)],
            covariances: vec![cov],
        }
    }

    #[test]
    fn conditioning_of_identity_is_one() {
        let report = conditioning_report(&single_component(SymMatrix::scaled_identity(3, 1.0)));
        assert!((report[0].condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_of_diagonal() {
        let cov = SymMatrix::from_array(array![[10.0, 0.0], [0.0, 0.1]]).unwrap();
        let report = conditioning_report(&single_component(cov));
        assert!((report[0].condition - 100.0).abs() < 1e-9);
        assert!((report[0].min_eig - 0.1).abs() < 1e-12);
        assert!((report[0].max_eig - 10.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_infinite_when_not_definite() {
        let cov = SymMatrix::from_array(array![[1.0, 0.0], [0.0, -0.5]]).unwrap();
        let report = conditioning_report(&single_component(cov));
        assert!(report[0].condition.is_infinite());
    }

    #[test]
    fn shrunk_covariance_condition_bound() {
        let mut rng = rng_from(11);
        for _ in 0..10 {
            let dim = 6;
            let mut g = Array2::zeros((dim, dim));
            for v in g.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let s = g.t().dot(&g);
            let s = SymMatrix::from_array(s).unwrap();
            let theta = 1.0;
            let beta = 0.5;
            let blended = s.as_array() * beta
                + Array2::<f64>::eye(dim) * ((1.0 - beta) * theta);
            let blended = SymMatrix::from_array(blended).unwrap();
            let (_, s_max) = crate::linalg::eig_extremes(&s);
            let report = conditioning_report(&single_component(blended));
            let bound = (beta * s_max + (1.0 - beta) * theta) / ((1.0 - beta) * theta);
            assert!(
                report[0].condition <= bound + 1e-9,
                "condition {} exceeds bound {bound}",
                report[0].condition
            );
        }
    }
}
