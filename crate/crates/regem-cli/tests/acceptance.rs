//! Acceptance gate: one test per criterion. Each test prints exactly one
//! `ACCEPTANCE <n> <slug>: PASS|FAIL (<detail>)` line and then asserts,
//! so verdicts appear under `--nocapture` and inside failure output.
//!
//! Thresholds are stated inline next to each check. Criteria that the
//! current data revisions or estimator behavior cannot reach are left
//! failing with the measured numbers in the detail string.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use regem::cv::{default_grid, select_eta, CvConfig};
use regem::data::{
    ar1_covariance, load_csv, pca_fit_transform, ColumnSelector, CsvSchema, Impute, SyntheticSpec,
};
use regem::data::generate_gmm;
use regem::em::{e_step, fit, m_step_regularized, CvPolicy, EmConfig, EmInit};
use regem::kmeans::{init_from_kmeans, kmeans_fit, KMeansConfig};
use regem::linalg::CholeskyFactor;
use regem::metrics::{best_permutation_assignment, best_permutation_brute, ConfusionMatrix};
use regem::rng::{mix_seed, rng_from, stream};
use regem_cli::config::{
    DatasetConfig, ExperimentConfig, ExperimentKind, GemBlock, ImputeKind, KmeansBlock, PcaConfig,
    PcaFitOn, RgemBlock, SplitConfig, StarvationConfig, SyntheticConfig,
};
use regem_cli::csvout::ExperimentRecord;
use regem_cli::experiments::{run_real_accuracy, run_real_starvation, run_synthetic_sweep};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

const BASE_SEED: u64 = 20260819;

fn report(n: usize, slug: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("ACCEPTANCE {n} {slug}: {verdict} ({detail})");
    println!("{line}");
    assert!(pass, "{line}");
}

fn data_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/{file}"))
}

fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "mean over empty slice");
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty(), "median over empty slice");
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn accuracies(
    records: &[ExperimentRecord],
    keep: impl Fn(&ExperimentRecord) -> bool,
) -> Vec<f64> {
    let out: Vec<f64> = records
        .iter()
        .filter(|r| keep(r))
        .map(|r| r.accuracy)
        .collect();
    assert!(
        out.iter().all(|a| a.is_finite()),
        "group contains failed runs"
    );
    out
}

fn sweep_cfg(n: usize, dims: Vec<usize>, methods: Vec<&str>, reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        kind: ExperimentKind::SyntheticDimSweep,
        methods: methods.into_iter().map(String::from).collect(),
        repetitions: reps,
        base_seed: BASE_SEED,
        output: PathBuf::from("unused.csv"),
        synthetic: Some(SyntheticConfig {
            n,
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
        gem: Some(GemBlock::default()),
        rgem: Some(RgemBlock::default()),
    }
}

struct RealSource {
    file: &'static str,
    name: &'static str,
    label_column: usize,
    drop_columns: &'static [usize],
}

const BREAST_CANCER: RealSource = RealSource {
    file: "breast-cancer-wisconsin.data",
    name: "breast-cancer",
    label_column: 10,
    drop_columns: &[0],
};

const IONOSPHERE: RealSource = RealSource {
    file: "ionosphere.data",
    name: "ionosphere",
    label_column: 34,
    drop_columns: &[],
};

fn real_cfg(
    source: &RealSource,
    kind: ExperimentKind,
    reps: usize,
    keeps: Option<Vec<f64>>,
) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        methods: vec!["kmeans".into(), "gem".into(), "rgem".into()],
        repetitions: reps,
        base_seed: BASE_SEED,
        output: PathBuf::from("unused.csv"),
        synthetic: None,
        dataset: Some(DatasetConfig {
            path: data_path(source.file),
            name: source.name.to_string(),
            label_column: Some(source.label_column),
            label_name: None,
            drop_columns: source.drop_columns.to_vec(),
            drop_names: vec![],
            missing_token: "?".to_string(),
            impute: ImputeKind::Median,
            has_header: false,
            k: None,
        }),
        pca: Some(PcaConfig {
            variance_threshold: 0.95,
            fit_on: PcaFitOn::Full,
        }),
        split: Some(SplitConfig {
            train_fraction: 0.7,
            recompose_every: 10,
        }),
        starvation: keeps.map(|keep_fractions| StarvationConfig { keep_fractions }),
        kmeans: Some(KmeansBlock::default()),
        gem: Some(GemBlock::default()),
        rgem: Some(RgemBlock::default()),
    }
}

fn mean_acc(records: &[ExperimentRecord], method: &str, m: usize) -> f64 {
    mean(&accuracies(records, |r| r.method == method && r.m == m))
}

/// Dimension sweep shape at n=500: the classical fit collapses with
/// dimension, the regularized fit stays within 5 points of its
/// low-dimension accuracy and leads by 10 points at m=100.
#[test]
fn criterion_01_dimension_sweep_shape() {
    let started = Instant::now();
    let cfg = sweep_cfg(500, vec![10, 40, 70, 100], vec!["kmeans", "gem", "rgem"], 20);
    let records = run_synthetic_sweep(&cfg).expect("sweep runs");
    let elapsed = started.elapsed().as_secs_f64();
    let gem10 = mean_acc(&records, "gem", 10);
    let gem100 = mean_acc(&records, "gem", 100);
    let rg10 = mean_acc(&records, "rgem", 10);
    let rg100 = mean_acc(&records, "rgem", 100);
    let gem_collapse = gem10 - gem100 >= 0.10;
    let rg_flat = rg100 >= rg10 - 0.05;
    let gap = rg100 - gem100;
    let gap_ok = gap >= 0.10;
    let in_time = elapsed < 900.0;
    report(
        1,
        "dimension-sweep-shape",
        gem_collapse && rg_flat && gap_ok && in_time,
        format!(
            "gem mean {:.3}@m10 -> {:.3}@m100 (drop {:.3}, need >= 0.100); \
             rgem {:.3}@m10 -> {:.3}@m100 (drop {:.3}, allowed <= 0.050); \
             rgem-gem gap at m100 {:.3} (need >= 0.100); {:.0}s (cap 900s)",
            gem10,
            gem100,
            gem10 - gem100,
            rg10,
            rg100,
            rg10 - rg100,
            gap,
            elapsed
        ),
    );
}

/// At n=1000 the classical breakdown (a 10-point drop from the m=10
/// level) appears between m=50 and m=100, not at m <= 40.
#[test]
fn criterion_02_breakdown_dimension() {
    let cfg = sweep_cfg(1000, vec![10, 40, 70, 100], vec!["gem"], 20);
    let records = run_synthetic_sweep(&cfg).expect("sweep runs");
    let base = mean_acc(&records, "gem", 10);
    let drop40 = base - mean_acc(&records, "gem", 40);
    let drop70 = base - mean_acc(&records, "gem", 70);
    let drop100 = base - mean_acc(&records, "gem", 100);
    let early = drop40 >= 0.10;
    let late = drop70 >= 0.10 || drop100 >= 0.10;
    report(
        2,
        "breakdown-dimension",
        !early && late,
        format!(
            "gem drop from m10 base {base:.3}: {drop40:.3}@m40 (must stay < 0.100), \
             {drop70:.3}@m70 / {drop100:.3}@m100 (one must reach 0.100)"
        ),
    );
}

/// Retained-variance cuts at the 0.95 threshold on the two vendored
/// datasets. A one-dimension mismatch is a documented deviation of the
/// public file revisions, not a pass.
#[test]
fn criterion_03_pca_dimensions() {
    let bc_schema = CsvSchema {
        label_column: Some(ColumnSelector::Index(10)),
        missing_token: "?".to_string(),
        impute: Impute::Median,
        drop_columns: vec![ColumnSelector::Index(0)],
        has_header: false,
    };
    let (bc, _) = load_csv(&data_path("breast-cancer-wisconsin.data"), &bc_schema)
        .expect("breast cancer loads");
    let (bc_model, _) = pca_fit_transform(&bc, 0.95).expect("pca fits");
    let iono_schema = CsvSchema {
        label_column: Some(ColumnSelector::Index(34)),
        missing_token: "?".to_string(),
        impute: Impute::Median,
        drop_columns: vec![],
        has_header: false,
    };
    let (iono, _) =
        load_csv(&data_path("ionosphere.data"), &iono_schema).expect("ionosphere loads");
    let (iono_model, _) = pca_fit_transform(&iono, 0.95).expect("pca fits");
    report(
        3,
        "pca-dimensions",
        bc_model.d == 8 && iono_model.d == 26,
        format!(
            "breast-cancer d={} (required 8), ionosphere d={} (required 26); \
             off-by-one would be a documented deviation, not a pass",
            bc_model.d, iono_model.d
        ),
    );
}

struct MedianOutcome {
    name: &'static str,
    km: f64,
    gem: f64,
    rgem: f64,
    elapsed: f64,
}

impl MedianOutcome {
    fn ordered(&self) -> bool {
        self.rgem >= self.gem && self.gem >= self.km
    }

    fn gap(&self) -> f64 {
        self.gem.min(self.rgem) - self.km
    }

    fn ok(&self) -> bool {
        self.ordered() && (0.05..=0.15).contains(&self.gap()) && self.elapsed < 600.0
    }
}

fn median_outcome(source: &RealSource) -> MedianOutcome {
    let started = Instant::now();
    let cfg = real_cfg(source, ExperimentKind::RealAccuracy, 100, None);
    let records = run_real_accuracy(&cfg).expect("accuracy runs");
    let med = |method: &str| median(accuracies(&records, |r| r.method == method));
    MedianOutcome {
        name: source.name,
        km: med("kmeans"),
        gem: med("gem"),
        rgem: med("rgem"),
        elapsed: started.elapsed().as_secs_f64(),
    }
}

/// Held-out medians over 100 simulations per dataset: rgem >= gem >=
/// kmeans, with the mixture-over-kmeans margin inside [0.05, 0.15],
/// under 600 seconds per dataset.
#[test]
fn criterion_04_real_median_ordering() {
    let iono = median_outcome(&IONOSPHERE);
    let bc = median_outcome(&BREAST_CANCER);
    let fmt = |o: &MedianOutcome| {
        format!(
            "{} medians km/gem/rgem {:.3}/{:.3}/{:.3}, margin {:.3} (band [0.050, 0.150]), {:.0}s",
            o.name,
            o.km,
            o.gem,
            o.rgem,
            o.gap(),
            o.elapsed
        )
    };
    report(
        4,
        "real-median-ordering",
        iono.ok() && bc.ok(),
        format!("{}; {}", fmt(&iono), fmt(&bc)),
    );
}

/// Training-set starvation on ionosphere: kmeans mean accuracy moves
/// less than 5 points across the keep grid while rgem holds at least
/// gem's accuracy at keep=0.1.
#[test]
fn criterion_05_starvation_robustness() {
    let keeps = vec![1.0, 0.7, 0.4, 0.1];
    let cfg = real_cfg(
        &IONOSPHERE,
        ExperimentKind::RealStarvation,
        100,
        Some(keeps.clone()),
    );
    let records = run_real_starvation(&cfg).expect("starvation runs");
    let km_means: Vec<f64> = keeps
        .iter()
        .map(|&k| {
            mean(&accuracies(&records, |r| {
                r.method == "kmeans" && r.keep_fraction == k
            }))
        })
        .collect();
    let km_range = km_means.iter().cloned().fold(f64::MIN, f64::max)
        - km_means.iter().cloned().fold(f64::MAX, f64::min);
    let at = |method: &str| {
        mean(&accuracies(&records, |r| {
            r.method == method && r.keep_fraction == 0.1
        }))
    };
    let gem01 = at("gem");
    let rgem01 = at("rgem");
    report(
        5,
        "starvation-robustness",
        km_range < 0.05 && rgem01 >= gem01,
        format!(
            "kmeans mean accuracy range {km_range:.3} across keeps {keeps:?} (cap 0.050); \
             keep=0.1 rgem {rgem01:.3} vs gem {gem01:.3} (need rgem >= gem)"
        ),
    );
}

/// Frozen fit grid shared by the ascent and floor criteria:
/// (n, m) cells x 13 seeds, both variants, full 40-iteration traces.
const ASCENT_CELLS: [(usize, usize); 8] = [
    (200, 5),
    (200, 20),
    (200, 40),
    (200, 50),
    (500, 5),
    (500, 20),
    (500, 40),
    (500, 50),
];
const ASCENT_SEEDS: u64 = 13;
const ASCENT_BASE: u64 = 0xC6;

struct AscentFit {
    trace_lls: Vec<f64>,
    refresh: Vec<bool>,
    floored: usize,
    spectral: Vec<(f64, f64)>,
}

fn ascent_fit(cell: usize, seed_index: u64, regularized: bool, track: bool) -> AscentFit {
    let (n, m) = ASCENT_CELLS[cell];
    let master = mix_seed(mix_seed(ASCENT_BASE, cell as u64), seed_index);
    let spec = SyntheticSpec::new(n, m, mix_seed(master, stream::GENERATE));
    let data = generate_gmm(&spec).expect("generation succeeds");
    let hc = kmeans_fit(
        &data.values,
        &KMeansConfig::new(3, mix_seed(master, stream::KMEANS)),
    )
    .expect("kmeans succeeds");
    let init = EmInit::from(init_from_kmeans(&data.values, &hc).expect("init succeeds"));
    let mut cfg = if regularized {
        EmConfig::regularized()
    } else {
        EmConfig::classical()
    };
    cfg.rel_tol = 0.0;
    cfg.track_spectral_floor = track;
    let policy = CvPolicy::new(mix_seed(master, stream::CV));
    let cv = if regularized { Some(&policy) } else { None };
    let result = fit(&data.values, &init, &cfg, cv).expect("fit succeeds");
    AscentFit {
        trace_lls: result.penalized_ll_trace(),
        refresh: result.trace.iter().map(|s| s.refresh).collect(),
        floored: result.trace.iter().map(|s| s.floored.len()).sum(),
        spectral: result
            .trace
            .iter()
            .flat_map(|s| {
                s.spectral
                    .as_ref()
                    .map(|checks| checks.iter().map(|c| (c.min_eig, c.floor)).collect())
                    .unwrap_or_else(Vec::new)
            })
            .collect(),
    }
}

/// Penalized log-likelihood is non-decreasing within 1e-8 relative
/// slack on every iteration pair inside a refresh segment, over 208
/// seeded fits across mixed (n, m) shapes.
#[test]
fn criterion_06_em_ascent() {
    let mut fits = 0usize;
    let mut violations = 0usize;
    let mut worst_dip = 0.0f64;
    let mut floored = 0usize;
    for cell in 0..ASCENT_CELLS.len() {
        for seed in 0..ASCENT_SEEDS {
            for regularized in [false, true] {
                let outcome = ascent_fit(cell, seed, regularized, false);
                fits += 1;
                floored += outcome.floored;
                for t in 1..outcome.trace_lls.len() {
                    if outcome.refresh[t] {
                        continue;
                    }
                    let prev = outcome.trace_lls[t - 1];
                    let dip = (prev - outcome.trace_lls[t]) / prev.abs();
                    worst_dip = worst_dip.max(dip);
                    if dip > 1e-8 {
                        violations += 1;
                    }
                }
            }
        }
    }
    report(
        6,
        "em-ascent",
        fits == 208 && violations == 0,
        format!(
            "{fits} fits, {violations} ascent violations (slack 1e-8 relative, \
             worst dip {worst_dip:.2e}), {floored} weight-floor events"
        ),
    );
}

/// After every regularized M-step, min_eig(cov_k) clears the blend
/// floor (1-beta_k)*theta_k within 1e-10, over criterion 6's rgem runs.
#[test]
fn criterion_07_shrinkage_floor() {
    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut worst_defect = f64::MIN;
    for cell in 0..ASCENT_CELLS.len() {
        for seed in 0..ASCENT_SEEDS {
            let outcome = ascent_fit(cell, seed, true, true);
            for &(min_eig, floor) in &outcome.spectral {
                checks += 1;
                worst_defect = worst_defect.max(floor - min_eig);
                if min_eig < floor - 1e-10 {
                    violations += 1;
                }
            }
        }
    }
    report(
        7,
        "shrinkage-floor",
        checks > 0 && violations == 0,
        format!(
            "{checks} cluster checks over 104 fits, {violations} below floor \
             (tolerance 1e-10, worst floor-min_eig {worst_defect:.2e})"
        ),
    );
}

/// Shrinkage limits: eta=0 reproduces the eps=0 classical trace
/// bitwise from the same init, and eta=1e300 lands on the scaled
/// identity target within 1e-12 after one M-step.
#[test]
fn criterion_08_eta_limit_equivalence() {
    let mut bitwise_ok = 0usize;
    let mut worst_target_gap = 0.0f64;
    let seeds = 50u64;
    for s in 0..seeds {
        let master = mix_seed(0xE8, s);
        let spec = SyntheticSpec::new(150, 5, mix_seed(master, stream::GENERATE));
        let data = generate_gmm(&spec).expect("generation succeeds");
        let hc = kmeans_fit(
            &data.values,
            &KMeansConfig::new(3, mix_seed(master, stream::KMEANS)),
        )
        .expect("kmeans succeeds");
        let (params, reg, sets) =
            init_from_kmeans(&data.values, &hc).expect("init succeeds");
        assert!(reg.etas.iter().all(|&e| e == 0.0), "init starts at eta=0");
        let init = EmInit::from((params.clone(), reg.clone(), sets));

        let mut classical = EmConfig::classical();
        classical.eps = 0.0;
        classical.rel_tol = 0.0;
        classical.max_iter = 15;
        let mut regularized = EmConfig::regularized();
        regularized.rel_tol = 0.0;
        regularized.max_iter = 15;
        let gem = fit(&data.values, &init, &classical, None).expect("classical fit");
        let rgem = fit(&data.values, &init, &regularized, None).expect("regularized fit");
        let gem_bits: Vec<u64> = gem
            .penalized_ll_trace()
            .iter()
            .map(|v| v.to_bits())
            .collect();
        let rgem_bits: Vec<u64> = rgem
            .penalized_ll_trace()
            .iter()
            .map(|v| v.to_bits())
            .collect();
        if gem_bits == rgem_bits {
            bitwise_ok += 1;
        }

        let mut saturated = reg.clone();
        for k in 0..3 {
            saturated.etas[k] = 1e300;
        }
        let resp = e_step(&data.values, &params).expect("e-step");
        let floor = 0.5 / data.n() as f64;
        let heavy =
            m_step_regularized(&data.values, &resp, &saturated, floor).expect("m-step");
        for (k, cov) in heavy.covariances.iter().enumerate() {
            let target = saturated.scales[k];
            let arr = cov.as_array();
            for i in 0..5 {
                for j in 0..5 {
                    let want = if i == j { target } else { 0.0 };
                    worst_target_gap = worst_target_gap.max((arr[[i, j]] - want).abs());
                }
            }
        }
    }
    report(
        8,
        "eta-limit-equivalence",
        bitwise_ok == seeds as usize && worst_target_gap <= 1e-12,
        format!(
            "eta=0 trace bitwise-equal to eps=0 classical for {bitwise_ok}/{seeds} seeds; \
             eta=1e300 worst |cov - target| {worst_target_gap:.2e} (cap 1e-12)"
        ),
    );
}

/// The exhaustive permutation search and the assignment-solver path
/// return the same matched count on 500 random labelings.
#[test]
fn criterion_09_accuracy_oracle() {
    let mut rng = rng_from(0xACC);
    let mut agreements = 0usize;
    let instances = 500usize;
    for _ in 0..instances {
        let k = rng.gen_range(2..=5usize);
        let truth: Vec<usize> = (0..200).map(|_| rng.gen_range(0..k)).collect();
        let predicted: Vec<usize> = (0..200).map(|_| rng.gen_range(0..k)).collect();
        let c = ConfusionMatrix::build(&truth, &predicted, k).expect("valid labels");
        let (brute, _) = best_permutation_brute(&c);
        let (assigned, _) = best_permutation_assignment(&c);
        if brute == assigned {
            agreements += 1;
        }
    }
    report(
        9,
        "accuracy-oracle",
        agreements == instances,
        format!("{agreements}/{instances} instances agree exactly (K in 2..=5, n=200)"),
    );
}

/// Grid selection sanity: an exactly-correct identity target should
/// drive the choice to the grid maximum, abundant data under a wrong
/// target to the lower half. 80% of 50 trials each.
#[test]
fn criterion_10_cv_grid_selection() {
    let trials = 50u64;

    let mut grid_max_hits = 0usize;
    for t in 0..trials {
        let s = mix_seed(0xAC10, t);
        let mut rng = rng_from(s);
        let x = Array2::from_shape_fn((30, 20), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z
        });
        let theta0 = scatter_scale(&x);
        let grid = default_grid(30);
        let top = *grid.last().expect("nonempty grid");
        let d0: Vec<usize> = (0..30).collect();
        let outcome = select_eta(&x, &d0, theta0, &CvConfig::new(grid, mix_seed(s, 1)))
            .expect("selection succeeds");
        if outcome.chosen_eta == top {
            grid_max_hits += 1;
        }
    }

    let mut lower_half_hits = 0usize;
    let cov = ar1_covariance(0.9, 5).expect("valid rho");
    let chol = CholeskyFactor::factor(&cov).expect("ar1 is definite");
    let l = chol.lower().clone();
    for t in 0..trials {
        let s = mix_seed(0xBC10, t);
        let mut rng = rng_from(s);
        let mut x = Array2::<f64>::zeros((2000, 5));
        let mut z = [0.0f64; 5];
        for i in 0..2000 {
            for zj in z.iter_mut() {
                *zj = StandardNormal.sample(&mut rng);
            }
            for j in 0..5 {
                let mut acc = 0.0;
                for d in 0..=j {
                    acc += l[[j, d]] * z[d];
                }
                x[[i, j]] = acc;
            }
        }
        let theta0 = scatter_scale(&x);
        let grid = default_grid(2000);
        let half = grid.len() / 2;
        let lower: Vec<f64> = grid[..half].to_vec();
        let d0: Vec<usize> = (0..2000).collect();
        let outcome = select_eta(&x, &d0, theta0, &CvConfig::new(grid, mix_seed(s, 1)))
            .expect("selection succeeds");
        if lower.contains(&outcome.chosen_eta) {
            lower_half_hits += 1;
        }
    }

    let need = (trials as usize * 8).div_ceil(10);
    report(
        10,
        "cv-grid-selection",
        grid_max_hits >= need && lower_half_hits >= need,
        format!(
            "identity-true (m=20, 30 points): grid-max chosen {grid_max_hits}/{trials} \
             (need >= {need}); AR(0.9) (m=5, 2000 points): lower-half chosen \
             {lower_half_hits}/{trials} (need >= {need})"
        ),
    );
}

/// tr(S)/m for the sample scatter about the mean.
fn scatter_scale(x: &Array2<f64>) -> f64 {
    let (n, m) = x.dim();
    let mut mean = vec![0.0; m];
    for row in x.rows() {
        for (d, v) in row.iter().enumerate() {
            mean[d] += v;
        }
    }
    for v in mean.iter_mut() {
        *v /= n as f64;
    }
    let mut total = 0.0;
    for row in x.rows() {
        for (d, v) in row.iter().enumerate() {
            let c = v - mean[d];
            total += c * c;
        }
    }
    total / (n as f64 * m as f64)
}

/// Running criterion 1's sweep twice through the binary with the same
/// base seed yields byte-identical CSVs once the wall-clock column is
/// masked, and byte-identical summaries with no masking.
#[test]
fn criterion_11_csv_determinism() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config_path = dir.path().join("sweep.toml");
    let config_text = format!(
        r#"kind = "synthetic_dim_sweep"
methods = ["kmeans", "gem", "rgem"]
repetitions = 20
base_seed = {BASE_SEED}
output = "unused.csv"

[synthetic]
n = 500
k = 3
mean_radius = 2.0
rhos = [0.8, 0.5, 0.2]
dims = [10, 40, 70, 100]

[kmeans]
[gem]
[rgem]
"#
    );
    std::fs::write(&config_path, config_text).expect("config written");
    let outputs = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for out in &outputs {
        let result = Command::new(env!("CARGO_BIN_EXE_regem"))
            .arg("sweep-dim")
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .output()
            .expect("binary runs");
        assert!(
            result.status.success(),
            "sweep failed: {}",
            String::from_utf8_lossy(&result.stderr)
        );
    }
    let a = std::fs::read_to_string(&outputs[0]).expect("first csv");
    let b = std::fs::read_to_string(&outputs[1]).expect("second csv");
    let a_lines: Vec<&str> = a.lines().collect();
    let b_lines: Vec<&str> = b.lines().collect();
    let mut masked_equal = a_lines.len() == b_lines.len();
    let wall = a_lines[0]
        .split(',')
        .position(|c| c == "wall_ms")
        .expect("wall_ms column");
    let mut cells = 0usize;
    if masked_equal {
        for (la, lb) in a_lines.iter().zip(&b_lines) {
            let mut ca: Vec<&str> = la.split(',').collect();
            let mut cb: Vec<&str> = lb.split(',').collect();
            ca[wall] = "masked";
            cb[wall] = "masked";
            cells += ca.len();
            if ca != cb {
                masked_equal = false;
                break;
            }
        }
    }
    let sa = std::fs::read_to_string(dir.path().join("a_summary.csv")).expect("first summary");
    let sb = std::fs::read_to_string(dir.path().join("b_summary.csv")).expect("second summary");
    let summaries_equal = sa == sb;
    report(
        11,
        "csv-determinism",
        masked_equal && summaries_equal,
        format!(
            "{} lines, {cells} cells identical with wall_ms masked \
             (wall clock cannot repeat); summaries byte-identical: {summaries_equal}",
            a_lines.len()
        ),
    );
}
