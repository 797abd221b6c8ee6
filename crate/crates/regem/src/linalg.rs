//! Dense symmetric matrix kernels: Cholesky factorization, triangular
//! solves, and a cyclic Jacobi eigendecomposition.
//!
//! Quadratic forms, log-determinants and traces of inverse products are
//! all computed through triangular solves against the Cholesky factor.
//! No routine in this module forms an explicit matrix inverse.

use ndarray::{Array1, Array2, ArrayView1};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite: pivot {pivot:e} at index {index}")]
    Indefinite { index: usize, pivot: f64 },
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Symmetric matrix stored dense.
///
/// Construction symmetrizes the input as (A + A^T) / 2. Definiteness is
/// only decided at factorization time, so indefinite symmetric matrices
/// are representable (the eigensolver accepts them).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    entries: Array2<f64>,
}

impl SymMatrix {
    pub fn from_array(a: Array2<f64>) -> Result<Self, LinalgError> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        let mut entries = a;
        for i in 0..rows {
            for j in (i + 1)..rows {
                let v = 0.5 * (entries[[i, j]] + entries[[j, i]]);
                entries[[i, j]] = v;
                entries[[j, i]] = v;
            }
        }
        Ok(Self { entries })
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        Self {
            entries: Array2::eye(dim) * scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[[i, i]]).sum()
    }
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Array2<f64>,
}

impl CholeskyFactor {
    /// Factors `a = L L^T`, failing on the first non-positive pivot.
    /// A failed factorization is the definiteness test used throughout
    /// the crate.
    pub fn factor(a: &SymMatrix) -> Result<Self, LinalgError> {
        let n = a.dim();
        let m = a.as_array();
        let mut l: Array2<f64> = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let mut sum = m[[i, j]];
                {
                    let ri = l.row(i);
                    let ri = ri.as_slice().expect("row-major layout");
                    let rj = l.row(j);
                    let rj = rj.as_slice().expect("row-major layout");
                    sum -= ri[..j]
                        .iter()
                        .zip(&rj[..j])
                        .map(|(x, y)| x * y)
                        .sum::<f64>();
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(LinalgError::Indefinite { index: i, pivot: sum });
                    }
                    l[[i, i]] = sum.sqrt();
                } else {
                    l[[i, j]] = sum / l[[j, j]];
                }
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn lower(&self) -> &Array2<f64> {
        &self.l
    }

    /// log det A = 2 Σ_i log L_ii.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[[i, i]].ln()).sum::<f64>()
    }

    fn forward_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let row = self.l.row(i);
            let row = row.as_slice().expect("row-major layout");
            let dot: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - dot) / row[i];
        }
    }

    fn backward_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= self.l[[k, i]] * x[k];
            }
            x[i] = v / self.l[[i, i]];
        }
    }

    /// Solves A x = b by forward and back substitution.
    pub fn solve_vec(&self, b: ArrayView1<f64>) -> Result<Array1<f64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::Dimension { expected: n, got: b.len() });
        }
        let mut x = b.to_owned();
        let slice = x.as_slice_mut().expect("owned array is contiguous");
        self.forward_in_place(slice);
        self.backward_in_place(slice);
        Ok(x)
    }

    /// v^T A^{-1} v = ||L^{-1} v||^2.
    pub fn quadratic_form(&self, v: ArrayView1<f64>) -> Result<f64, LinalgError> {
        let n = self.dim();
        if v.len() != n {
            return Err(LinalgError::Dimension { expected: n, got: v.len() });
        }
        let mut y = v.to_owned();
        Ok(self.quadratic_form_in_place(y.as_slice_mut().expect("owned array is contiguous")))
    }

    /// [`Self::quadratic_form`] over a caller-owned scratch buffer.
    /// The buffer is overwritten with L^{-1} v.
    pub fn quadratic_form_in_place(&self, v: &mut [f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim());
        self.forward_in_place(v);
        v.iter().map(|t| t * t).sum()
    }

    /// tr(A^{-1} B) via one solve per column of `b`.
    pub fn trace_solve(&self, b: &SymMatrix) -> Result<f64, LinalgError> {
        let n = self.dim();
        if b.dim() != n {
            return Err(LinalgError::Dimension { expected: n, got: b.dim() });
        }
        let mut acc = 0.0;
        let mut col = vec![0.0; n];
        for j in 0..n {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = b.as_array()[[i, j]];
            }
            self.forward_in_place(&mut col);
            self.backward_in_place(&mut col);
            acc += col[j];
        }
        Ok(acc)
    }
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. Indefinite input is fine.
pub fn sym_eigen(a: &SymMatrix) -> (Array1<f64>, Array2<f64>) {
    let n = a.dim();
    let mut m = a.as_array().clone();
    let mut v: Array2<f64> = Array2::eye(n);
    if n <= 1 {
        let vals = Array1::from_iter((0..n).map(|i| m[[i, i]]));
        return (vals, v);
    }
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() <= 1e-14 * scale || off == 0.0 {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[[i, p]];
                        let aiq = m[[i, q]];
                        let new_p = c * aip - s * aiq;
                        let new_q = s * aip + c * aiq;
                        m[[i, p]] = new_p;
                        m[[p, i]] = new_p;
                        m[[i, q]] = new_q;
                        m[[q, i]] = new_q;
                    }
                }
                m[[p, p]] = app - t * apq;
                m[[q, q]] = aqq + t * apq;
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let vals = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vecs: Array2<f64> = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vecs[[i, dst]] = v[[i, src]];
        }
    }
    (vals, vecs)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eig_extremes(a: &SymMatrix) -> (f64, f64) {
    let (vals, _) = sym_eigen(a);
    (vals[0], vals[vals.len() - 1])
}
