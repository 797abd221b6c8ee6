//! TOML experiment configuration: one file describes the experiment
//! kind, the methods to compare, their settings, and the data source.

use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("config: {0}")]
pub struct ConfigError(pub String);

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError(message.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SyntheticDimSweep,
    RealAccuracy,
    RealStarvation,
    SingleFit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Uniform when omitted.
    pub priors: Option<Vec<f64>>,
    #[serde(default = "default_radius")]
    pub mean_radius: f64,
    #[serde(default = "default_rhos")]
    pub rhos: Vec<f64>,
    /// Dimension grid; sweeps visit every entry, other kinds use the
    /// first.
    pub dims: Vec<usize>,
}

fn default_k() -> usize {
    3
}

fn default_radius() -> f64 {
    2.0
}

fn default_rhos() -> Vec<f64> {
    vec![0.8, 0.5, 0.2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputeKind {
    Median,
    DropRow,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    /// Tag written to the dataset column of every record.
    pub name: String,
    /// Label column by raw position; mutually exclusive with
    /// `label_name`.
    pub label_column: Option<usize>,
    pub label_name: Option<String>,
    #[serde(default)]
    pub drop_columns: Vec<usize>,
    #[serde(default)]
    pub drop_names: Vec<String>,
    #[serde(default = "default_missing")]
    pub missing_token: String,
    #[serde(default = "default_impute")]
    pub impute: ImputeKind,
    #[serde(default)]
    pub has_header: bool,
    /// Cluster count for unlabeled data; labeled data infers it.
    pub k: Option<usize>,
}

fn default_missing() -> String {
    "?".into()
}

fn default_impute() -> ImputeKind {
    ImputeKind::Median
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaFitOn {
    /// Reduce the whole dataset once, before any splitting.
    Full,
    /// Refit the projection on each training split.
    Train,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaConfig {
    #[serde(default = "default_threshold")]
    pub variance_threshold: f64,
    #[serde(default = "default_fit_on")]
    pub fit_on: PcaFitOn,
}

fn default_threshold() -> f64 {
    0.95
}

fn default_fit_on() -> PcaFitOn {
    PcaFitOn::Full
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// A fresh split is drawn every this many repetitions.
    #[serde(default = "default_recompose")]
    pub recompose_every: usize,
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_recompose() -> usize {
    10
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: default_train_fraction(),
            recompose_every: default_recompose(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarvationConfig {
    pub keep_fractions: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmeansBlock {
    #[serde(default = "default_n_init")]
    pub n_init: usize,
    #[serde(default = "default_km_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_km_tol")]
    pub tol: f64,
}

fn default_n_init() -> usize {
    10
}

fn default_km_max_iter() -> usize {
    200
}

fn default_km_tol() -> f64 {
    1e-4
}

impl Default for KmeansBlock {
    fn default() -> Self {
        Self {
            n_init: default_n_init(),
            max_iter: default_km_max_iter(),
            tol: default_km_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GemBlock {
    #[serde(default = "default_em_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Soft-count floor as a fraction of n; omitted means 1/(2n).
    pub min_weight_floor: Option<f64>,
}

fn default_em_max_iter() -> usize {
    40
}

fn default_eps() -> f64 {
    1e-4
}

fn default_rel_tol() -> f64 {
    1e-6
}

impl Default for GemBlock {
    fn default() -> Self {
        Self {
            max_iter: default_em_max_iter(),
            eps: default_eps(),
            rel_tol: default_rel_tol(),
            min_weight_floor: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RgemBlock {
    #[serde(default = "default_em_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_refresh")]
    pub refresh_period: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    pub min_weight_floor: Option<f64>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Explicit shrinkage candidates; omitted means the per-cluster
    /// size-scaled default grid.
    pub grid: Option<Vec<f64>>,
}

fn default_refresh() -> usize {
    10
}

fn default_folds() -> usize {
    5
}

impl Default for RgemBlock {
    fn default() -> Self {
        Self {
            max_iter: default_em_max_iter(),
            refresh_period: default_refresh(),
            rel_tol: default_rel_tol(),
            min_weight_floor: None,
            folds: default_folds(),
            grid: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub methods: Vec<String>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub output: PathBuf,
    pub synthetic: Option<SyntheticConfig>,
    pub dataset: Option<DatasetConfig>,
    pub pca: Option<PcaConfig>,
    pub split: Option<SplitConfig>,
    pub starvation: Option<StarvationConfig>,
    pub kmeans: Option<KmeansBlock>,
    pub gem: Option<GemBlock>,
    pub rgem: Option<RgemBlock>,
}

pub const METHOD_NAMES: [&str; 3] = ["kmeans", "gem", "rgem"];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self =
            toml::from_str(&text).map_err(|e| err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn split_config(&self) -> SplitConfig {
        self.split.unwrap_or_default()
    }

    pub fn kmeans_block(&self) -> KmeansBlock {
        self.kmeans.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repetitions < 1 {
            return Err(err("repetitions must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(err("methods list is empty"));
        }
        for (i, name) in self.methods.iter().enumerate() {
            if !METHOD_NAMES.contains(&name.as_str()) {
                return Err(err(format!(
                    "unknown method {name:?}; expected one of {METHOD_NAMES:?}"
                )));
            }
            if self.methods[..i].contains(name) {
                return Err(err(format!("method {name:?} listed twice")));
            }
        }
        let requires = |name: &str, present: bool| -> Result<(), ConfigError> {
            if self.methods.iter().any(|m| m == name) && !present {
                Err(err(format!("method {name:?} is named but has no [{name}] block")))
            } else {
                Ok(())
            }
        };
        requires("kmeans", self.kmeans.is_some())?;
        requires("gem", self.gem.is_some())?;
        requires("rgem", self.rgem.is_some())?;
        if let Some(s) = &self.synthetic {
            self.validate_synthetic(s)?;
        }
        if let Some(d) = &self.dataset {
            if d.label_column.is_some() && d.label_name.is_some() {
                return Err(err("set only one of label_column and label_name"));
            }
            if d.name.is_empty() {
                return Err(err("dataset.name must be nonempty"));
            }
        }
        if let Some(p) = &self.pca {
            if !(p.variance_threshold > 0.0 && p.variance_threshold <= 1.0) {
                return Err(err(format!(
                    "pca.variance_threshold must lie in (0, 1], got {}",
                    p.variance_threshold
                )));
            }
        }
        if let Some(s) = &self.split {
            if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
                return Err(err(format!(
                    "split.train_fraction must lie in (0, 1), got {}",
                    s.train_fraction
                )));
            }
            if s.recompose_every == 0 {
                return Err(err("split.recompose_every must be at least 1"));
            }
        }
        if let Some(r) = &self.rgem {
            if r.folds < 2 {
                return Err(err("rgem.folds must be at least 2"));
            }
        }
        match self.kind {
            ExperimentKind::SyntheticDimSweep => {
                let s = self
                    .synthetic
                    .as_ref()
                    .ok_or_else(|| err("synthetic_dim_sweep needs a [synthetic] block"))?;
                if s.dims.is_empty() {
                    return Err(err("synthetic.dims must be nonempty"));
                }
            }
            ExperimentKind::RealAccuracy | ExperimentKind::RealStarvation => {
                let d = self
                    .dataset
                    .as_ref()
                    .ok_or_else(|| err("real experiments need a [dataset] block"))?;
                if d.label_column.is_none() && d.label_name.is_none() {
                    return Err(err(
                        "real experiments score against labels; set label_column or label_name",
                    ));
                }
                if self.kind == ExperimentKind::RealStarvation {
                    let grid = self
                        .starvation
                        .as_ref()
                        .ok_or_else(|| err("real_starvation needs a [starvation] block"))?;
                    if grid.keep_fractions.is_empty() {
                        return Err(err("starvation.keep_fractions must be nonempty"));
                    }
                    for &f in &grid.keep_fractions {
                        if !(f > 0.0 && f <= 1.0) {
                            return Err(err(format!(
                                "keep fraction {f} outside (0, 1]"
                            )));
                        }
                    }
                }
            }
            ExperimentKind::SingleFit => {
                if self.methods.len() != 1 {
                    return Err(err("single_fit takes exactly one method"));
                }
                match (&self.synthetic, &self.dataset) {
                    (Some(_), Some(_)) => {
                        return Err(err(
                            "single_fit takes either [synthetic] or [dataset], not both",
                        ))
                    }
                    (None, None) => {
                        return Err(err("single_fit needs [synthetic] or [dataset]"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn validate_synthetic(&self, s: &SyntheticConfig) -> Result<(), ConfigError> {
        if s.k == 0 {
            return Err(err("synthetic.k must be positive"));
        }
        if s.n < 2 {
            return Err(err("synthetic.n must be at least 2"));
        }
        if s.dims.iter().any(|&m| m == 0) {
            return Err(err("synthetic.dims entries must be positive"));
        }
        if let Some(p) = &s.priors {
            if p.len() != s.k {
                return Err(err(format!(
                    "synthetic.priors has {} entries for k = {}",
                    p.len(),
                    s.k
                )));
            }
        }
        if s.rhos.len() != s.k {
            return Err(err(format!(
                "synthetic.rhos has {} entries for k = {}",
                s.rhos.len(),
                s.k
            )));
        }
        Ok(())
    }
}
