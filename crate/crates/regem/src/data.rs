//! Data handling: synthetic mixture generation with AR(1) covariances,
//! delimited-text ingestion with imputation, PCA reduction, stratified
//! splitting and subsampling.

use crate::linalg::{sym_eigen, CholeskyFactor, LinalgError, SymMatrix};
use crate::rng::rng_from;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{name} = {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },
    #[error("{message}")]
    Invalid { message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema: {message}")]
    Schema { message: String },
    #[error("data carries no variance")]
    DegenerateData,
    #[error("group {class} would keep {kept} rows; at least 2 required")]
    InsufficientData { class: usize, kept: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Numeric observations with optional ground-truth labels in [0, K).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub values: Array2<f64>,
    pub labels: Option<Vec<usize>>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>, labels: Option<Vec<usize>>) -> Result<Self, DataError> {
        if let Some((r, c)) = values
            .indexed_iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(idx, _)| idx)
        {
            return Err(DataError::Invalid {
                message: format!("non-finite value at row {r}, column {c}"),
            });
        }
        if let Some(l) = &labels {
            if l.len() != values.nrows() {
                return Err(DataError::Invalid {
                    message: format!(
                        "{} labels for {} rows",
                        l.len(),
                        values.nrows()
                    ),
                });
            }
        }
        Ok(Self { values, labels })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    /// Number of classes, labels present: max label + 1.
    pub fn class_count(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |&m| m + 1))
    }

    fn take_rows(&self, rows: &[usize]) -> DataMatrix {
        let m = self.m();
        let mut values = Array2::zeros((rows.len(), m));
        for (out, &r) in rows.iter().enumerate() {
            values.row_mut(out).assign(&self.values.row(r));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&r| l[r]).collect());
        DataMatrix { values, labels }
    }
}

/// Mixture recipe: K spherical-shell means, AR(1) covariances, categorical
/// priors.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub k: usize,
    pub priors: Vec<f64>,
    pub mean_radius: f64,
    pub rhos: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Three equally weighted clusters, radius-2 means, ρ = (0.8, 0.5, 0.2).
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            k: 3,
            priors: vec![1.0 / 3.0; 3],
            mean_radius: 2.0,
            rhos: vec![0.8, 0.5, 0.2],
            n,
            m,
            seed,
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        if self.k == 0 || self.n == 0 || self.m == 0 {
            return Err(DataError::Invalid {
                message: "k, n, m must all be positive".into(),
            });
        }
        if self.priors.len() != self.k || self.rhos.len() != self.k {
            return Err(DataError::Invalid {
                message: format!(
                    "expected {} priors and ρ values, got {} and {}",
                    self.k,
                    self.priors.len(),
                    self.rhos.len()
                ),
            });
        }
        let total: f64 = self.priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 || self.priors.iter().any(|&p| p < 0.0) {
            return Err(DataError::Invalid {
                message: format!("priors must be nonnegative and sum to 1, got sum {total}"),
            });
        }
        if self.mean_radius < 0.0 {
            return Err(DataError::Domain {
                name: "mean_radius",
                value: self.mean_radius,
            });
        }
        Ok(())
    }
}

/// Covariance with entries ρ^|i−j|, positive definite for every |ρ| < 1.
pub fn ar1_covariance(rho: f64, m: usize) -> Result<SymMatrix, DataError> {
    if !(rho.abs() < 1.0) {
        return Err(DataError::Domain {
            name: "rho",
            value: rho,
        });
    }
    let mut a = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            a[[i, j]] = rho.powi((i as i64 - j as i64).unsigned_abs() as i32);
        }
    }
    Ok(SymMatrix::from_array(a).expect("square by construction"))
}

fn draw_sphere_means<R: Rng>(k: usize, m: usize, radius: f64, rng: &mut R) -> Vec<Array1<f64>> {
    (0..k)
        .map(|_| {
            loop {
                let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    return Array1::from(v.iter().map(|x| x * radius / norm).collect::<Vec<_>>());
                }
            }
        })
        .collect()
}

/// Labeled sample from the mixture. Draw order is fixed: the K means
/// first (m normals each, normalized to the radius), then per point one
/// uniform for the label followed by m normals mapped through the
/// cluster's Cholesky factor.
pub fn generate_gmm(spec: &SyntheticSpec) -> Result<DataMatrix, DataError> {
    spec.validate()?;
    let mut rng = rng_from(spec.seed);
    let means = draw_sphere_means(spec.k, spec.m, spec.mean_radius, &mut rng);
    let chols: Vec<CholeskyFactor> = spec
        .rhos
        .iter()
        .map(|&rho| Ok(CholeskyFactor::factor(&ar1_covariance(rho, spec.m)?)?))
        .collect::<Result<_, DataError>>()?;
    let mut values = Array2::zeros((spec.n, spec.m));
    let mut labels = Vec::with_capacity(spec.n);
    let mut z = vec![0.0; spec.m];
    for i in 0..spec.n {
        let u: f64 = rng.gen();
        let mut label = spec.k - 1;
        let mut cum = 0.0;
        for (j, &p) in spec.priors.iter().enumerate() {
            cum += p;
            if u < cum {
                label = j;
                break;
            }
        }
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
        }
        let l = chols[label].lower();
        let mean = &means[label];
        for d in 0..spec.m {
            let mut x = mean[d];
            for (j, &zj) in z.iter().enumerate().take(d + 1) {
                x += l[[d, j]] * zj;
            }
            values[[i, d]] = x;
        }
        labels.push(label);
    }
    DataMatrix::new(values, Some(labels))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impute {
    /// Remove any row containing the missing token.
    DropRow,
    /// Replace missing cells with the column median of observed values.
    Median,
}

/// Ingestion schema. Column selectors refer to positions in the raw
/// file, before any drops.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub label_column: Option<ColumnSelector>,
    pub missing_token: String,
    pub impute: Impute,
    pub drop_columns: Vec<ColumnSelector>,
    pub has_header: bool,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: None,
            missing_token: "?".into(),
            impute: Impute::Median,
            drop_columns: Vec::new(),
            has_header: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub cells_imputed: usize,
    /// Raw label strings in first-appearance order; index = mapped label.
    pub class_names: Vec<String>,
}

fn resolve_column(
    selector: &ColumnSelector,
    header: Option<&[String]>,
    width: usize,
) -> Result<usize, DataError> {
    match selector {
        ColumnSelector::Index(i) => {
            if *i >= width {
                Err(DataError::Schema {
                    message: format!("column index {i} out of range for width {width}"),
                })
            } else {
                Ok(*i)
            }
        }
        ColumnSelector::Name(name) => {
            let header = header.ok_or_else(|| DataError::Schema {
                message: format!("column named {name:?} requires a header row"),
            })?;
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| DataError::Schema {
                    message: format!("no column named {name:?} in header"),
                })
        }
    }
}

/// Parses a comma-delimited numeric file into a matrix, extracting an
/// optional label column (mapped to 0..K−1 by first appearance) and
/// applying the missing-value policy. Returns the matrix together with
/// an ingestion report.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<(DataMatrix, IngestReport), DataError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let header: Option<Vec<String>> = if schema.has_header {
        match lines.next() {
            Some((_, l)) => Some(l.split(',').map(|s| s.trim().to_string()).collect()),
            None => {
                return Err(DataError::Parse {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
    } else {
        None
    };
    let rows: Vec<(usize, Vec<&str>)> = lines
        .map(|(lineno, l)| (lineno, l.split(',').map(str::trim).collect()))
        .collect();
    if rows.is_empty() {
        return Err(DataError::Parse {
            line: if schema.has_header { 2 } else { 1 },
            message: "no data rows".into(),
        });
    }
    let width = rows[0].1.len();
    for (lineno, fields) in &rows {
        if fields.len() != width {
            return Err(DataError::Parse {
                line: *lineno,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
    }
    let header_ref = header.as_deref();
    let label_col = schema
        .label_column
        .as_ref()
        .map(|s| resolve_column(s, header_ref, width))
        .transpose()?;
    let mut dropped_cols = BTreeSet::new();
    for selector in &schema.drop_columns {
        dropped_cols.insert(resolve_column(selector, header_ref, width)?);
    }
    if let Some(lc) = label_col {
        if dropped_cols.contains(&lc) {
            return Err(DataError::Schema {
                message: format!("label column {lc} is also dropped"),
            });
        }
    }
    let feature_cols: Vec<usize> = (0..width)
        .filter(|c| Some(*c) != label_col && !dropped_cols.contains(c))
        .collect();
    if feature_cols.is_empty() {
        return Err(DataError::Schema {
            message: "no feature columns remain".into(),
        });
    }
    let rows_read = rows.len();
    // Cell = Some(value) or None for the missing token.
    let mut kept: Vec<(usize, Vec<Option<f64>>, Option<&str>)> = Vec::with_capacity(rows_read);
    let mut rows_dropped = 0;
    for (lineno, fields) in &rows {
        let label = label_col.map(|c| fields[c]);
        if let Some(l) = label {
            if l == schema.missing_token {
                return Err(DataError::Parse {
                    line: *lineno,
                    message: "label value is missing".into(),
                });
            }
        }
        let mut cells = Vec::with_capacity(feature_cols.len());
        let mut missing = false;
        for &c in &feature_cols {
            let raw = fields[c];
            if raw == schema.missing_token {
                cells.push(None);
                missing = true;
            } else {
                let v: f64 = raw.parse().map_err(|_| DataError::Parse {
                    line: *lineno,
                    message: format!("cannot parse {raw:?} as a number"),
                })?;
                cells.push(Some(v));
            }
        }
        if missing && schema.impute == Impute::DropRow {
            rows_dropped += 1;
            continue;
        }
        kept.push((*lineno, cells, label));
    }
    if kept.is_empty() {
        return Err(DataError::Parse {
            line: 0,
            message: "every row was dropped".into(),
        });
    }
    let n = kept.len();
    let m = feature_cols.len();
    let mut cells_imputed = 0;
    let mut medians = vec![f64::NAN; m];
    if schema.impute == Impute::Median {
        for c in 0..m {
            let mut observed: Vec<f64> = kept
                .iter()
                .filter_map(|(_, cells, _)| cells[c])
                .collect();
            if observed.is_empty() {
                return Err(DataError::Schema {
                    message: format!("feature column {c} has no observed values"),
                });
            }
            observed.sort_by(f64::total_cmp);
            let mid = observed.len() / 2;
            medians[c] = if observed.len() % 2 == 1 {
                observed[mid]
            } else {
                0.5 * (observed[mid - 1] + observed[mid])
            };
        }
    }
    let mut values = Array2::zeros((n, m));
    for (i, (_, cells, _)) in kept.iter().enumerate() {
        for (c, cell) in cells.iter().enumerate() {
            values[[i, c]] = match cell {
                Some(v) => *v,
                None => {
                    cells_imputed += 1;
                    medians[c]
                }
            };
        }
    }
    let mut class_names: Vec<String> = Vec::new();
    let labels = if label_col.is_some() {
        let mut mapped = Vec::with_capacity(n);
        for (_, _, label) in &kept {
            let name = label.expect("label column present");
            let id = match class_names.iter().position(|c| c == name) {
                Some(id) => id,
                None => {
                    class_names.push(name.to_string());
                    class_names.len() - 1
                }
            };
            mapped.push(id);
        }
        Some(mapped)
    } else {
        None
    };
    let matrix = DataMatrix::new(values, labels)?;
    Ok((
        matrix,
        IngestReport {
            rows_read,
            rows_dropped,
            cells_imputed,
            class_names,
        },
    ))
}

/// Centering vector, orthonormal projection basis, and the spectrum it
/// was cut from.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// m×d, orthonormal columns, descending eigenvalue order.
    pub basis: Array2<f64>,
    /// Full descending spectrum (negatives clamped to zero).
    pub eigenvalues: Vec<f64>,
    pub retained_ratio: f64,
    pub d: usize,
}

impl PcaModel {
    pub fn transform(&self, x: &Array2<f64>) -> Array2<f64> {
        let centered = x - &self.mean;
        centered.dot(&self.basis)
    }

    /// Plain-text dump: mean, spectrum, basis columns.
    pub fn save_text(&self, path: &Path) -> Result<(), DataError> {
        let mut f = std::fs::File::create(path)?;
        writeln!(
            f,
            "pca d={} m={} retained={:.17e}",
            self.d,
            self.mean.len(),
            self.retained_ratio
        )?;
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.17e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "mean {}", join(self.mean.as_slice().expect("contiguous")))?;
        writeln!(f, "eigenvalues {}", join(&self.eigenvalues))?;
        for c in 0..self.d {
            let col: Vec<f64> = self.basis.column(c).to_vec();
            writeln!(f, "basis{} {}", c, join(&col))?;
        }
        Ok(())
    }
}

fn descending_clamped(vals: Array1<f64>, vecs: Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let p = vals.len();
    let mut lambdas = Vec::with_capacity(p);
    let mut sorted = Array2::zeros(vecs.dim());
    for (out, src) in (0..p).rev().enumerate() {
        lambdas.push(vals[src].max(0.0));
        sorted.column_mut(out).assign(&vecs.column(src));
    }
    (lambdas, sorted)
}

fn fix_signs(basis: &mut Array2<f64>) {
    for mut col in basis.columns_mut() {
        let mut arg = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                arg = i;
            }
        }
        if col[arg] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

fn cut_dimension(lambdas: &[f64], threshold: f64) -> Result<(usize, f64, f64), DataError> {
    let mut cums = Vec::with_capacity(lambdas.len());
    let mut cum = 0.0;
    for &l in lambdas {
        cum += l;
        cums.push(cum);
    }
    let total = *cums.last().expect("nonempty spectrum");
    if total <= 0.0 {
        return Err(DataError::DegenerateData);
    }
    for (i, &c) in cums.iter().enumerate() {
        if c >= threshold * total {
            return Ok((i + 1, c / total, total));
        }
    }
    Ok((lambdas.len(), 1.0, total))
}

fn pca_from_spectrum(
    x: &DataMatrix,
    mean: Array1<f64>,
    lambdas: Vec<f64>,
    basis_full: Array2<f64>,
    threshold: f64,
) -> Result<(PcaModel, DataMatrix), DataError> {
    let (d, retained_ratio, _) = cut_dimension(&lambdas, threshold)?;
    let mut basis = Array2::zeros((basis_full.nrows(), d));
    for c in 0..d {
        basis.column_mut(c).assign(&basis_full.column(c));
    }
    fix_signs(&mut basis);
    let model = PcaModel {
        mean,
        basis,
        eigenvalues: lambdas,
        retained_ratio,
        d,
    };
    let projected = model.transform(&x.values);
    let reduced = DataMatrix::new(projected, x.labels.clone())?;
    Ok((model, reduced))
}

fn pca_via_covariance(x: &DataMatrix, threshold: f64) -> Result<(PcaModel, DataMatrix), DataError> {
    let n = x.n();
    let mean = x.values.mean_axis(ndarray::Axis(0)).expect("n >= 1");
    let centered = &x.values - &mean;
    let cov = centered.t().dot(&centered) / (n as f64 - 1.0);
    let (vals, vecs) = sym_eigen(&SymMatrix::from_array(cov)?);
    let (lambdas, basis_full) = descending_clamped(vals, vecs);
    pca_from_spectrum(x, mean, lambdas, basis_full, threshold)
}

fn pca_via_gram(x: &DataMatrix, threshold: f64) -> Result<(PcaModel, DataMatrix), DataError> {
    let n = x.n();
    let m = x.m();
    let mean = x.values.mean_axis(ndarray::Axis(0)).expect("n >= 1");
    let centered = &x.values - &mean;
    let gram = centered.dot(&centered.t()) / (n as f64 - 1.0);
    let (vals, vecs) = sym_eigen(&SymMatrix::from_array(gram)?);
    let (lambdas, u_sorted) = descending_clamped(vals, vecs);
    // Right vectors v_j = X_cᵀ u_j / √((n−1)λ_j) for every positive λ_j.
    let scale_cutoff = lambdas[0] * 1e-14;
    let mut basis_full = Array2::zeros((m, n));
    for j in 0..n {
        if lambdas[j] > scale_cutoff {
            let u = u_sorted.column(j);
            let v = centered.t().dot(&u) / ((n as f64 - 1.0) * lambdas[j]).sqrt();
            basis_full.column_mut(j).assign(&v);
        }
    }
    pca_from_spectrum(x, mean, lambdas, basis_full, threshold)
}

/// Centers the data, finds the smallest d whose leading eigenvalue mass
/// reaches `variance_threshold` of the total, and projects onto that
/// basis. Labels pass through unchanged.
pub fn pca_fit_transform(
    x: &DataMatrix,
    variance_threshold: f64,
) -> Result<(PcaModel, DataMatrix), DataError> {
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(DataError::Domain {
            name: "variance_threshold",
            value: variance_threshold,
        });
    }
    if x.n() < 2 {
        return Err(DataError::Invalid {
            message: format!("need at least 2 rows, got {}", x.n()),
        });
    }
    if x.n() >= x.m() {
        pca_via_covariance(x, variance_threshold)
    } else {
        pca_via_gram(x, variance_threshold)
    }
}

fn shuffled<R: Rng>(indices: &mut [usize], rng: &mut R) {
    for i in (1..indices.len()).rev() {
        let j = rng.gen_range(0..=i);
        indices.swap(i, j);
    }
}

fn class_indices(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut sets = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        sets[l].push(i);
    }
    sets
}

/// Largest-remainder apportionment of `total` across groups proportional
/// to group size; remainder ties break toward the lower group index.
fn apportion(sizes: &[usize], fraction: f64, total: usize) -> Vec<usize> {
    let mut targets: Vec<usize> = sizes
        .iter()
        .map(|&s| (fraction * s as f64).floor() as usize)
        .collect();
    let assigned: usize = targets.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = fraction * sizes[a] as f64 - targets[a] as f64;
        let rb = fraction * sizes[b] as f64 - targets[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &g in order.iter().take(total.saturating_sub(assigned)) {
        targets[g] += 1;
    }
    targets
}

/// Random split preserving class proportions within one row per class.
/// Unlabeled data splits uniformly. Row order within each part follows
/// the original order.
pub fn split_train_test(
    x: &DataMatrix,
    train_fraction: f64,
    seed: u64,
) -> Result<(DataMatrix, DataMatrix), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::Domain {
            name: "train_fraction",
            value: train_fraction,
        });
    }
    let n = x.n();
    let total_train = (train_fraction * n as f64).floor() as usize;
    let mut rng = rng_from(seed);
    let mut train_rows: Vec<usize> = Vec::with_capacity(total_train);
    let mut test_rows: Vec<usize> = Vec::with_capacity(n - total_train);
    match &x.labels {
        Some(labels) => {
            let sets = class_indices(labels);
            let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
            let targets = apportion(&sizes, train_fraction, total_train);
            for (set, &t) in sets.iter().zip(&targets) {
                let mut idx = set.clone();
                shuffled(&mut idx, &mut rng);
                train_rows.extend_from_slice(&idx[..t]);
                test_rows.extend_from_slice(&idx[t..]);
            }
        }
        None => {
            let mut idx: Vec<usize> = (0..n).collect();
            shuffled(&mut idx, &mut rng);
            train_rows.extend_from_slice(&idx[..total_train]);
            test_rows.extend_from_slice(&idx[total_train..]);
        }
    }
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((x.take_rows(&train_rows), x.take_rows(&test_rows)))
}

/// Stratified uniform subsample keeping `keep_fraction` of the rows;
/// `keep_fraction = 1` returns the input unchanged without consuming
/// randomness.
pub fn subsample(x: &DataMatrix, keep_fraction: f64, seed: u64) -> Result<DataMatrix, DataError> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(DataError::Domain {
            name: "keep_fraction",
            value: keep_fraction,
        });
    }
    if keep_fraction == 1.0 {
        return Ok(x.clone());
    }
    let n = x.n();
    let total = (keep_fraction * n as f64).round() as usize;
    let mut rng = rng_from(seed);
    let mut rows: Vec<usize> = Vec::with_capacity(total);
    match &x.labels {
        Some(labels) => {
            let sets = class_indices(labels);
            let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
            let targets = apportion(&sizes, keep_fraction, total);
            for (class, (set, &t)) in sets.iter().zip(&targets).enumerate() {
                if t < 2 {
                    return Err(DataError::InsufficientData { class, kept: t });
                }
                let mut idx = set.clone();
                shuffled(&mut idx, &mut rng);
                rows.extend_from_slice(&idx[..t]);
            }
        }
        None => {
            if total < 2 {
                return Err(DataError::InsufficientData {
                    class: 0,
                    kept: total,
                });
            }
            let mut idx: Vec<usize> = (0..n).collect();
            shuffled(&mut idx, &mut rng);
            rows.extend_from_slice(&idx[..total]);
        }
    }
    rows.sort_unstable();
    Ok(x.take_rows(&rows))
}
