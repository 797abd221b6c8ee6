//! Clustering strategies behind one trait, registered by name and
//! selected at runtime. All methods in one run consume the same shared
//! K-means result so comparisons are paired: the K-means strategy
//! reports it directly, the EM strategies start from it.

use crate::em::{self, CvPolicy, EmConfig, EmError, EmFitResult, EmVariant};
use crate::kmeans::{init_from_kmeans, nearest_labels, HardClustering, KmeansError};
use crate::metrics::ClusterConditioning;
use crate::model::MixtureParams;
use ndarray::Array2;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MethodError {
    #[error(transparent)]
    Kmeans(#[from] KmeansError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error("method {name:?} registered twice")]
    Duplicate { name: String },
    #[error("no method named {name:?}; available: {available:?}")]
    Unknown {
        name: String,
        available: Vec<String>,
    },
}

/// Per-run inputs shared by every method: the common K-means result and
/// the seed stream for shrinkage selection.
#[derive(Debug)]
pub struct FitContext<'a> {
    pub init: &'a HardClustering,
    pub cv_seed: u64,
}

/// Fitted model kept for scoring held-out points.
#[derive(Debug, Clone)]
pub enum FittedModel {
    Centroids(Array2<f64>),
    Mixture(MixtureParams),
}

impl FittedModel {
    /// Cluster assignment for new points: nearest centroid, or posterior
    /// argmax under the mixture.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>, MethodError> {
        match self {
            FittedModel::Centroids(c) => Ok(nearest_labels(x, c)),
            FittedModel::Mixture(params) => Ok(em::e_step(x, params)?.hard_labels()),
        }
    }
}

#[derive(Debug)]
pub struct MethodFit {
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// Per-cluster covariance conditioning; empty for centroid models.
    pub conditioning: Vec<ClusterConditioning>,
    /// Final shrinkage strengths; empty unless the method selects them.
    pub etas: Vec<f64>,
    pub model: FittedModel,
}

pub trait ClusteringMethod {
    fn name(&self) -> &'static str;
    fn fit(&self, x: &Array2<f64>, ctx: &FitContext) -> Result<MethodFit, MethodError>;
}

/// Reports the shared K-means result as its own fit.
#[derive(Debug, Default)]
pub struct KMeansMethod;

impl ClusteringMethod for KMeansMethod {
    fn name(&self) -> &'static str {
        "kmeans"
    }

    fn fit(&self, _x: &Array2<f64>, ctx: &FitContext) -> Result<MethodFit, MethodError> {
        Ok(MethodFit {
            labels: ctx.init.labels.clone(),
            iterations: ctx.init.iterations,
            conditioning: Vec::new(),
            etas: Vec::new(),
            model: FittedModel::Centroids(ctx.init.centroids.clone()),
        })
    }
}

fn em_fit_to_method(result: EmFitResult) -> MethodFit {
    MethodFit {
        labels: result.hard_labels.clone(),
        iterations: result.iterations_run,
        conditioning: result.conditioning.clone(),
        etas: result.etas(),
        model: FittedModel::Mixture(result.params),
    }
}

/// Classical EM with the εI ridge.
#[derive(Debug)]
pub struct GemMethod {
    config: EmConfig,
}

impl GemMethod {
    pub fn new(mut config: EmConfig) -> Self {
        config.variant = EmVariant::Classical;
        Self { config }
    }
}

impl Default for GemMethod {
    fn default() -> Self {
        Self::new(EmConfig::classical())
    }
}

impl ClusteringMethod for GemMethod {
    fn name(&self) -> &'static str {
        "gem"
    }

    fn fit(&self, x: &Array2<f64>, ctx: &FitContext) -> Result<MethodFit, MethodError> {
        let init = init_from_kmeans(x, ctx.init)?.into();
        let result = em::fit(x, &init, &self.config, None)?;
        Ok(em_fit_to_method(result))
    }
}

/// Regularized EM with cross-validated shrinkage toward scaled identity.
#[derive(Debug)]
pub struct RgemMethod {
    config: EmConfig,
    folds: usize,
    grid: Option<Vec<f64>>,
}

impl RgemMethod {
    pub fn new(mut config: EmConfig, folds: usize, grid: Option<Vec<f64>>) -> Self {
        config.variant = EmVariant::Regularized;
        Self {
            config,
            folds,
            grid,
        }
    }
}

impl Default for RgemMethod {
    fn default() -> Self {
        Self::new(EmConfig::regularized(), 5, None)
    }
}

impl ClusteringMethod for RgemMethod {
    fn name(&self) -> &'static str {
        "rgem"
    }

    fn fit(&self, x: &Array2<f64>, ctx: &FitContext) -> Result<MethodFit, MethodError> {
        let init = init_from_kmeans(x, ctx.init)?.into();
        let policy = CvPolicy {
            folds: self.folds,
            grid: self.grid.clone(),
            seed: ctx.cv_seed,
        };
        let result = em::fit(x, &init, &self.config, Some(&policy))?;
        Ok(em_fit_to_method(result))
    }
}

/// Name-indexed strategy store; lookup order is alphabetical.
#[derive(Default)]
pub struct MethodRegistry {
    methods: BTreeMap<&'static str, Box<dyn ClusteringMethod>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// All three standard strategies under their default settings.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(Box::new(KMeansMethod)).expect("fresh registry");
        r.register(Box::<GemMethod>::default()).expect("fresh registry");
        r.register(Box::<RgemMethod>::default()).expect("fresh registry");
        r
    }

    pub fn register(&mut self, method: Box<dyn ClusteringMethod>) -> Result<(), MethodError> {
        let name = method.name();
        if self.methods.contains_key(name) {
            return Err(MethodError::Duplicate { name: name.into() });
        }
        self.methods.insert(name, method);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&dyn ClusteringMethod, MethodError> {
        self.methods
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| MethodError::Unknown {
                name: name.into(),
                available: self.names().iter().map(|s| s.to_string()).collect(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}
