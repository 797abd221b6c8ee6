//! Seeded experiment runners. Every record's seed is derivable from the
//! base seed and the record's indices:
//!
//! * synthetic sweep: master = mix(mix(base, dim_index), run); the data
//!   seed is mix(master, GENERATE).
//! * real data: split seed = mix(mix(base, SPLIT), run / recompose_every);
//!   master = mix(base, run), shared across keep fractions so the full
//!   grid pairs runs.
//! * subsampling: mix(mix(master, SUBSAMPLE), keep_index).
//! * every fit: K-means seed mix(master, KMEANS), shrinkage-selection
//!   seed mix(master, CV).
//!
//! Within a run all methods share one generated dataset and one K-means
//! result. Per-run failures become records with accuracy = nan and the
//! sweep continues; only setup (config, data source) errors abort.

use crate::config::{
    DatasetConfig, ExperimentConfig, ExperimentKind, GemBlock, ImputeKind, PcaFitOn, RgemBlock,
};
use crate::csvout::ExperimentRecord;
use regem::data::{
    generate_gmm, load_csv, pca_fit_transform, split_train_test, subsample, ColumnSelector,
    CsvSchema, DataError, DataMatrix, Impute, SyntheticSpec,
};
use regem::em::EmConfig;
use regem::kmeans::{kmeans_fit, HardClustering, KMeansConfig, KmeansError};
use regem::methods::{
    ClusteringMethod, FitContext, GemMethod, KMeansMethod, MethodError, MethodFit,
    MethodRegistry, RgemMethod,
};
use regem::metrics::{clustering_accuracy, MetricsError};
use regem::rng::{mix_seed, stream};
use ndarray::Array2;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<MethodError> for RunError {
    fn from(e: MethodError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<KmeansError> for RunError {
    fn from(e: KmeansError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<MetricsError> for RunError {
    fn from(e: MetricsError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

fn gem_config(block: &GemBlock) -> EmConfig {
    let mut cfg = EmConfig::classical();
    cfg.max_iter = block.max_iter;
    cfg.eps = block.eps;
    cfg.rel_tol = block.rel_tol;
    cfg.min_weight_floor = block.min_weight_floor;
    cfg
}

fn rgem_config(block: &RgemBlock) -> EmConfig {
    let mut cfg = EmConfig::regularized();
    cfg.max_iter = block.max_iter;
    cfg.refresh_period = block.refresh_period;
    cfg.rel_tol = block.rel_tol;
    cfg.min_weight_floor = block.min_weight_floor;
    cfg
}

/// Registry holding exactly the configured methods, plus the method
/// order as named in the config.
pub fn build_registry(cfg: &ExperimentConfig) -> Result<(MethodRegistry, Vec<String>), RunError> {
    let mut registry = MethodRegistry::new();
    for name in &cfg.methods {
        let method: Box<dyn ClusteringMethod> = match name.as_str() {
            "kmeans" => Box::new(KMeansMethod),
            "gem" => {
                let block = cfg.gem.as_ref().expect("validated");
                Box::new(GemMethod::new(gem_config(block)))
            }
            "rgem" => {
                let block = cfg.rgem.as_ref().expect("validated");
                Box::new(RgemMethod::new(
                    rgem_config(block),
                    block.folds,
                    block.grid.clone(),
                ))
            }
            other => return Err(RunError::Setup(format!("unknown method {other:?}"))),
        };
        registry.register(method).map_err(RunError::from)?;
    }
    Ok((registry, cfg.methods.clone()))
}

pub fn csv_schema(d: &DatasetConfig) -> CsvSchema {
    let mut drop_columns: Vec<ColumnSelector> = d
        .drop_columns
        .iter()
        .map(|&i| ColumnSelector::Index(i))
        .collect();
    drop_columns.extend(d.drop_names.iter().cloned().map(ColumnSelector::Name));
    CsvSchema {
        label_column: d
            .label_column
            .map(ColumnSelector::Index)
            .or_else(|| d.label_name.clone().map(ColumnSelector::Name)),
        missing_token: d.missing_token.clone(),
        impute: match d.impute {
            ImputeKind::Median => Impute::Median,
            ImputeKind::DropRow => Impute::DropRow,
        },
        drop_columns,
        has_header: d.has_header,
    }
}

/// Identifies one record's position in the experiment grid.
struct RunSlot<'a> {
    dataset: &'a str,
    m: usize,
    n_train: usize,
    keep_fraction: f64,
    run: usize,
    master: u64,
}

fn failure_record(slot: &RunSlot, method: &str, wall_ms: f64, reason: &str) -> ExperimentRecord {
    eprintln!(
        "run failed: method={method} dataset={} m={} run={}: {reason}",
        slot.dataset, slot.m, slot.run
    );
    ExperimentRecord {
        method: method.to_string(),
        dataset: slot.dataset.to_string(),
        m: slot.m,
        n_train: slot.n_train,
        keep_fraction: slot.keep_fraction,
        run: slot.run,
        seed: slot.master,
        accuracy: f64::NAN,
        iterations: 0,
        wall_ms,
        min_cond: f64::NAN,
        max_cond: f64::NAN,
        etas: Vec::new(),
    }
}

fn fit_record(slot: &RunSlot, method: &str, fit: &MethodFit, accuracy: f64, wall_ms: f64) -> ExperimentRecord {
    let (min_cond, max_cond) = fit
        .conditioning
        .iter()
        .map(|c| c.condition)
        .fold(None, |acc: Option<(f64, f64)>, c| match acc {
            None => Some((c, c)),
            Some((lo, hi)) => Some((lo.min(c), hi.max(c))),
        })
        .map_or((f64::NAN, f64::NAN), |p| p);
    ExperimentRecord {
        method: method.to_string(),
        dataset: slot.dataset.to_string(),
        m: slot.m,
        n_train: slot.n_train,
        keep_fraction: slot.keep_fraction,
        run: slot.run,
        seed: slot.master,
        accuracy,
        iterations: fit.iterations,
        wall_ms,
        min_cond,
        max_cond,
        etas: fit.etas.clone(),
    }
}

/// Fits every configured method on one dataset instance from one shared
/// K-means initialization and scores each fit. Failures become nan
/// records.
#[allow(clippy::too_many_arguments)]
fn run_methods(
    registry: &MethodRegistry,
    order: &[String],
    x_train: &Array2<f64>,
    k: usize,
    kmeans_block: &crate::config::KmeansBlock,
    slot: &RunSlot,
    score: &dyn Fn(&MethodFit) -> Result<f64, RunError>,
) -> Vec<ExperimentRecord> {
    let km_cfg = KMeansConfig {
        k,
        n_init: kmeans_block.n_init,
        max_iter: kmeans_block.max_iter,
        tol: kmeans_block.tol,
        seed: mix_seed(slot.master, stream::KMEANS),
    };
    let started = Instant::now();
    let init: HardClustering = match kmeans_fit(x_train, &km_cfg) {
        Ok(hc) => hc,
        Err(e) => {
            let wall = started.elapsed().as_secs_f64() * 1e3;
            return order
                .iter()
                .map(|name| failure_record(slot, name, wall, &e.to_string()))
                .collect();
        }
    };
    let init_wall = started.elapsed().as_secs_f64() * 1e3;
    let ctx = FitContext {
        init: &init,
        cv_seed: mix_seed(slot.master, stream::CV),
    };
    order
        .iter()
        .map(|name| {
            let method = registry.get(name).expect("registered");
            let started = Instant::now();
            let outcome = method.fit(x_train, &ctx);
            let wall = match name.as_str() {
                // The shared initialization is the K-means fit itself.
                "kmeans" => init_wall,
                _ => started.elapsed().as_secs_f64() * 1e3,
            };
            match outcome {
                Ok(fit) => match score(&fit) {
                    Ok(accuracy) => fit_record(slot, name, &fit, accuracy, wall),
                    Err(e) => failure_record(slot, name, wall, &e.to_string()),
                },
                Err(e) => failure_record(slot, name, wall, &e.to_string()),
            }
        })
        .collect()
}

/// Dimension sweep on synthetic mixtures: every method fits every
/// (dimension, repetition) cell; accuracy is scored on the generated
/// sample itself.
pub fn run_synthetic_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, RunError> {
    let synth = cfg
        .synthetic
        .as_ref()
        .ok_or_else(|| RunError::Setup("missing [synthetic] block".into()))?;
    let (registry, order) = build_registry(cfg)?;
    let kmeans_block = cfg.kmeans_block();
    let mut records = Vec::new();
    for (dim_index, &m) in synth.dims.iter().enumerate() {
        for run in 0..cfg.repetitions {
            let master = mix_seed(mix_seed(cfg.base_seed, dim_index as u64), run as u64);
            let spec = SyntheticSpec {
                k: synth.k,
                priors: synth
                    .priors
                    .clone()
                    .unwrap_or_else(|| vec![1.0 / synth.k as f64; synth.k]),
                mean_radius: synth.mean_radius,
                rhos: synth.rhos.clone(),
                n: synth.n,
                m,
                seed: mix_seed(master, stream::GENERATE),
            };
            let data = generate_gmm(&spec)?;
            let truth = data.labels.clone().expect("generator labels");
            let slot = RunSlot {
                dataset: "synthetic",
                m,
                n_train: data.n(),
                keep_fraction: 1.0,
                run,
                master,
            };
            let score = |fit: &MethodFit| -> Result<f64, RunError> {
                let (acc, _) = clustering_accuracy(&truth, &fit.labels, synth.k)?;
                Ok(acc)
            };
            records.extend(run_methods(
                &registry,
                &order,
                &data.values,
                synth.k,
                &kmeans_block,
                &slot,
                &score,
            ));
        }
    }
    Ok(records)
}

/// Train/test views for one recomposition of a real dataset.
struct PreparedSplit {
    train: DataMatrix,
    test: DataMatrix,
    m: usize,
}

/// Loads a dataset and hands out deterministic splits keyed by split
/// index, reducing with PCA before or after splitting per config.
struct RealData {
    full: DataMatrix,
    k: usize,
    name: String,
    threshold: Option<f64>,
    fit_on: PcaFitOn,
    train_fraction: f64,
    base_seed: u64,
}

impl RealData {
    fn load(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        let d = cfg
            .dataset
            .as_ref()
            .ok_or_else(|| RunError::Setup("missing [dataset] block".into()))?;
        let (loaded, report) = load_csv(&d.path, &csv_schema(d))?;
        eprintln!(
            "loaded {}: {} rows, {} features, {} imputed, classes {:?}",
            d.name,
            loaded.n(),
            loaded.m(),
            report.cells_imputed,
            report.class_names
        );
        let k = match loaded.class_count() {
            Some(k) => k,
            None => d.k.ok_or_else(|| {
                RunError::Setup("unlabeled dataset needs dataset.k".into())
            })?,
        };
        let (threshold, fit_on) = match &cfg.pca {
            Some(p) => (Some(p.variance_threshold), p.fit_on),
            None => (None, PcaFitOn::Full),
        };
        let full = match (threshold, fit_on) {
            (Some(t), PcaFitOn::Full) => {
                let (model, reduced) = pca_fit_transform(&loaded, t)?;
                eprintln!(
                    "pca: {} -> {} dims, retained {:.4}",
                    loaded.m(),
                    model.d,
                    model.retained_ratio
                );
                reduced
            }
            _ => loaded,
        };
        Ok(Self {
            full,
            k,
            name: d.name.clone(),
            threshold,
            fit_on,
            train_fraction: cfg.split_config().train_fraction,
            base_seed: cfg.base_seed,
        })
    }

    fn split(&self, split_index: usize) -> Result<PreparedSplit, RunError> {
        let seed = mix_seed(mix_seed(self.base_seed, stream::SPLIT), split_index as u64);
        let (train, test) = split_train_test(&self.full, self.train_fraction, seed)?;
        let (train, test) = match (self.threshold, self.fit_on) {
            (Some(t), PcaFitOn::Train) => {
                let (model, train_reduced) = pca_fit_transform(&train, t)?;
                let test_reduced = DataMatrix::new(
                    model.transform(&test.values),
                    test.labels.clone(),
                )?;
                (train_reduced, test_reduced)
            }
            _ => (train, test),
        };
        let m = train.m();
        Ok(PreparedSplit { train, test, m })
    }
}

fn test_score<'a>(
    test: &'a PreparedSplit,
    k: usize,
) -> impl Fn(&MethodFit) -> Result<f64, RunError> + 'a {
    let truth = test.test.labels.clone().expect("labeled dataset");
    move |fit: &MethodFit| {
        let predicted = fit.model.predict(&test.test.values)?;
        let (acc, _) = clustering_accuracy(&truth, &predicted, k)?;
        Ok(acc)
    }
}

/// Held-out accuracy protocol: a fresh stratified split every
/// `recompose_every` repetitions, fits on the train part, posterior
/// argmax predictions scored on the test part.
pub fn run_real_accuracy(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, RunError> {
    let real = RealData::load(cfg)?;
    let (registry, order) = build_registry(cfg)?;
    let kmeans_block = cfg.kmeans_block();
    let recompose = cfg.split_config().recompose_every;
    let mut records = Vec::new();
    let mut current: Option<(usize, PreparedSplit)> = None;
    for run in 0..cfg.repetitions {
        let split_index = run / recompose;
        if current.as_ref().map(|(i, _)| *i) != Some(split_index) {
            current = Some((split_index, real.split(split_index)?));
        }
        let (_, prepared) = current.as_ref().expect("split prepared");
        let master = mix_seed(cfg.base_seed, run as u64);
        let slot = RunSlot {
            dataset: &real.name,
            m: prepared.m,
            n_train: prepared.train.n(),
            keep_fraction: 1.0,
            run,
            master,
        };
        let score = test_score(prepared, real.k);
        records.extend(run_methods(
            &registry,
            &order,
            &prepared.train.values,
            real.k,
            &kmeans_block,
            &slot,
            &score,
        ));
    }
    Ok(records)
}

/// Starvation protocol: the accuracy protocol's splits, with the train
/// part subsampled to each keep fraction before fitting; the test part
/// is untouched. A keep fraction of 1 reuses the train part unchanged,
/// so those records reproduce the accuracy protocol's results.
pub fn run_real_starvation(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, RunError> {
    let real = RealData::load(cfg)?;
    let grid = cfg
        .starvation
        .as_ref()
        .ok_or_else(|| RunError::Setup("missing [starvation] block".into()))?;
    let (registry, order) = build_registry(cfg)?;
    let kmeans_block = cfg.kmeans_block();
    let recompose = cfg.split_config().recompose_every;
    let mut splits: Vec<Option<PreparedSplit>> = Vec::new();
    let mut records = Vec::new();
    for (keep_index, &keep) in grid.keep_fractions.iter().enumerate() {
        for run in 0..cfg.repetitions {
            let split_index = run / recompose;
            if splits.len() <= split_index {
                splits.resize_with(split_index + 1, || None);
            }
            if splits[split_index].is_none() {
                splits[split_index] = Some(real.split(split_index)?);
            }
            let prepared = splits[split_index].as_ref().expect("split prepared");
            let master = mix_seed(cfg.base_seed, run as u64);
            let sub_seed = mix_seed(mix_seed(master, stream::SUBSAMPLE), keep_index as u64);
            let sub = match subsample(&prepared.train, keep, sub_seed) {
                Ok(sub) => sub,
                Err(e) => {
                    let slot = RunSlot {
                        dataset: &real.name,
                        m: prepared.m,
                        n_train: 0,
                        keep_fraction: keep,
                        run,
                        master,
                    };
                    records.extend(
                        order
                            .iter()
                            .map(|name| failure_record(&slot, name, 0.0, &e.to_string())),
                    );
                    continue;
                }
            };
            let slot = RunSlot {
                dataset: &real.name,
                m: prepared.m,
                n_train: sub.n(),
                keep_fraction: keep,
                run,
                master,
            };
            let score = test_score(prepared, real.k);
            records.extend(run_methods(
                &registry,
                &order,
                &sub.values,
                real.k,
                &kmeans_block,
                &slot,
                &score,
            ));
        }
    }
    Ok(records)
}

/// Outcome of the one-shot fit verb.
pub struct SingleFitReport {
    pub method: String,
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub iterations: usize,
    pub accuracy: Option<f64>,
    pub conditioning: Vec<regem::metrics::ClusterConditioning>,
    pub etas: Vec<f64>,
    pub wall_ms: f64,
}

/// One fit of one method on one dataset; numerical failures surface as
/// errors instead of nan records.
pub fn run_single_fit(cfg: &ExperimentConfig) -> Result<SingleFitReport, RunError> {
    let (registry, order) = build_registry(cfg)?;
    let method_name = order.first().cloned().expect("validated one method");
    let (data, k, dataset) = if let Some(synth) = &cfg.synthetic {
        let m = *synth
            .dims
            .first()
            .ok_or_else(|| RunError::Setup("synthetic.dims must be nonempty".into()))?;
        let master = mix_seed(cfg.base_seed, 0);
        let spec = SyntheticSpec {
            k: synth.k,
            priors: synth
                .priors
                .clone()
                .unwrap_or_else(|| vec![1.0 / synth.k as f64; synth.k]),
            mean_radius: synth.mean_radius,
            rhos: synth.rhos.clone(),
            n: synth.n,
            m,
            seed: mix_seed(master, stream::GENERATE),
        };
        (generate_gmm(&spec)?, synth.k, "synthetic".to_string())
    } else {
        let real = RealData::load(cfg)?;
        let k = real.k;
        let name = real.name.clone();
        (real.full, k, name)
    };
    let master = mix_seed(cfg.base_seed, 0);
    let km_cfg = KMeansConfig {
        k,
        n_init: cfg.kmeans_block().n_init,
        max_iter: cfg.kmeans_block().max_iter,
        tol: cfg.kmeans_block().tol,
        seed: mix_seed(master, stream::KMEANS),
    };
    let started = Instant::now();
    let init = kmeans_fit(&data.values, &km_cfg)?;
    let ctx = FitContext {
        init: &init,
        cv_seed: mix_seed(master, stream::CV),
    };
    let fit = registry.get(&method_name)?.fit(&data.values, &ctx)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let accuracy = match &data.labels {
        Some(truth) => Some(clustering_accuracy(truth, &fit.labels, k)?.0),
        None => None,
    };
    Ok(SingleFitReport {
        method: method_name,
        dataset,
        n: data.n(),
        m: data.m(),
        k,
        iterations: fit.iterations,
        accuracy,
        conditioning: fit.conditioning,
        etas: fit.etas,
        wall_ms,
    })
}

/// Dispatches on the configured kind; `single_fit` is driven separately
/// through [`run_single_fit`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, RunError> {
    match cfg.kind {
        ExperimentKind::SyntheticDimSweep => run_synthetic_sweep(cfg),
        ExperimentKind::RealAccuracy => run_real_accuracy(cfg),
        ExperimentKind::RealStarvation => run_real_starvation(cfg),
        ExperimentKind::SingleFit => Err(RunError::Setup(
            "single_fit runs through the fit verb".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{KmeansBlock, SyntheticConfig};
    use std::fmt::Write as _;
    use std::path::PathBuf;

    fn synthetic_cfg(methods: Vec<&str>, dims: Vec<usize>, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            kind: ExperimentKind::SyntheticDimSweep,
            methods: methods.into_iter().map(String::from).collect(),
            repetitions: reps,
            base_seed: 99,
            output: PathBuf::from("unused.csv"),
            synthetic: Some(SyntheticConfig {
                n: 90,
                k: 3,
                priors: None,
                mean_radius: 2.0,
                rhos: vec![0.8, 0.5, 0.2],
                dims,
            }),
            dataset: None,
            pca: None,
            split: None,
            starvation: None,
            kmeans: Some(KmeansBlock::default()),
            gem: Some(crate::config::GemBlock::default()),
            rgem: Some(crate::config::RgemBlock::default()),
        }
    }

    #[test]
    fn smallest_sweep_yields_one_record() {
        let cfg = synthetic_cfg(vec!["kmeans"], vec![10], 1);
        let records = run_synthetic_sweep(&cfg).expect("sweep runs");
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.method, "kmeans");
        assert_eq!(r.dataset, "synthetic");
        assert_eq!(r.m, 10);
        assert_eq!(r.n_train, 90);
        assert_eq!(r.run, 0);
        assert!(r.accuracy.is_finite());
        assert!(r.etas.is_empty());
    }

    #[test]
    fn same_seed_sweep_repeats_bitwise() {
        let cfg = synthetic_cfg(vec!["kmeans", "gem"], vec![4, 8], 2);
        let a = run_synthetic_sweep(&cfg).expect("first run");
        let b = run_synthetic_sweep(&cfg).expect("second run");
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.method, rb.method);
            assert_eq!(ra.seed, rb.seed);
            assert_eq!(ra.accuracy.to_bits(), rb.accuracy.to_bits());
            assert_eq!(ra.iterations, rb.iterations);
            assert_eq!(ra.min_cond.to_bits(), rb.min_cond.to_bits());
        }
    }

    fn fixture_csv(dir: &std::path::Path) -> PathBuf {
        let spec = SyntheticSpec::new(60, 3, 7);
        let data = generate_gmm(&spec).expect("generation succeeds");
        let labels = data.labels.as_ref().expect("generator labels");
        let mut text = String::new();
        for i in 0..data.n() {
            for j in 0..3 {
                let _ = write!(text, "{},", data.values[[i, j]]);
            }
            let _ = writeln!(text, "{}", labels[i]);
        }
        let path = dir.join("fixture.csv");
        std::fs::write(&path, text).expect("fixture written");
        path
    }

    fn real_cfg(kind: ExperimentKind, path: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            methods: vec!["kmeans".into()],
            repetitions: 4,
            base_seed: 5,
            output: PathBuf::from("unused.csv"),
            synthetic: None,
            dataset: Some(DatasetConfig {
                path,
                name: "fixture".into(),
                label_column: Some(3),
                label_name: None,
                drop_columns: vec![],
                drop_names: vec![],
                missing_token: "?".into(),
                impute: ImputeKind::Median,
                has_header: false,
                k: None,
            }),
            pca: None,
            split: Some(crate::config::SplitConfig {
                train_fraction: 0.7,
                recompose_every: 2,
            }),
            starvation: Some(crate::config::StarvationConfig {
                keep_fractions: vec![1.0],
            }),
            kmeans: Some(KmeansBlock::default()),
            gem: None,
            rgem: None,
        }
    }

    #[test]
    fn keep_one_starvation_reproduces_accuracy_records() {
        let dir = tempfile::tempdir().expect("temp dir");
        let path = fixture_csv(dir.path());
        let acc = run_real_accuracy(&real_cfg(ExperimentKind::RealAccuracy, path.clone()))
            .expect("accuracy runs");
        let starve = run_real_starvation(&real_cfg(ExperimentKind::RealStarvation, path))
            .expect("starvation runs");
        assert_eq!(acc.len(), starve.len());
        for (ra, rs) in acc.iter().zip(&starve) {
            assert_eq!(ra.seed, rs.seed);
            assert_eq!(ra.n_train, rs.n_train);
            assert_eq!(ra.accuracy.to_bits(), rs.accuracy.to_bits());
        }
    }

    #[test]
    fn failed_method_records_nan_and_the_run_continues() {
        // Cluster sizes 2/2/1 from k-means: the mixture init rejects the
        // singleton, the centroid method does not.
        let x = ndarray::arr2(&[
            [0.0, 0.0],
            [0.3, 0.0],
            [10.0, 10.0],
            [10.3, 10.0],
            [20.0, 20.0],
        ]);
        let cfg = synthetic_cfg(vec!["kmeans", "gem"], vec![2], 1);
        let (registry, order) = build_registry(&cfg).expect("registry builds");
        let slot = RunSlot {
            dataset: "crafted",
            m: 2,
            n_train: 5,
            keep_fraction: 1.0,
            run: 0,
            master: 1,
        };
        let score = |_: &MethodFit| Ok(0.5);
        let records = run_methods(
            &registry,
            &order,
            &x,
            3,
            &KmeansBlock::default(),
            &slot,
            &score,
        );
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].method, "kmeans");
        assert_eq!(records[0].accuracy, 0.5);
        assert_eq!(records[1].method, "gem");
        assert!(records[1].accuracy.is_nan());
        assert!(records[1].min_cond.is_nan());
        assert!(records[1].etas.is_empty());
    }
}
