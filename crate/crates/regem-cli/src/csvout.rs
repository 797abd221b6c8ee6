//! CSV emission for experiment records. Floats are written with
//! [`format_float`] (17 significant digits), enough to round-trip f64
//! exactly, so two runs with the same seed produce byte-identical files
//! apart from wall-clock columns.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// One (method, dataset instance) fit outcome. Failed fits carry
/// `accuracy = nan` and empty conditioning fields.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub method: String,
    pub dataset: String,
    pub m: usize,
    pub n_train: usize,
    pub keep_fraction: f64,
    pub run: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub iterations: usize,
    pub wall_ms: f64,
    pub min_cond: f64,
    pub max_cond: f64,
    pub etas: Vec<f64>,
}

pub const HEADER: &str =
    "method,dataset,m,n_train,keep_fraction,run,seed,accuracy,iterations,wall_ms,min_cond,max_cond,eta_list";

/// Full-precision float text: `{:.16e}` for normal values, lowercase
/// `nan`, `inf`, `-inf` for the specials.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn push_row(out: &mut String, r: &ExperimentRecord) {
    let etas = r
        .etas
        .iter()
        .map(|&e| format_float(e))
        .collect::<Vec<_>>()
        .join(";");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.method,
        r.dataset,
        r.m,
        r.n_train,
        format_float(r.keep_fraction),
        r.run,
        r.seed,
        format_float(r.accuracy),
        r.iterations,
        format_float(r.wall_ms),
        format_float(r.min_cond),
        format_float(r.max_cond),
        etas
    );
}

/// Renders records in order under [`HEADER`].
pub fn render_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        push_row(&mut out, r);
    }
    out
}

/// Per-group accuracy statistics over successful runs.
struct GroupStats {
    key: (String, String, usize, usize, String),
    runs: usize,
    failed: usize,
    accuracies: Vec<f64>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn std_dev(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Renders the summary companion: one row per
/// (method, dataset, m, n_train, keep_fraction) group in first-appearance
/// order, with accuracy statistics over the group's successful runs.
pub fn render_summary(records: &[ExperimentRecord]) -> String {
    let mut groups: Vec<GroupStats> = Vec::new();
    for r in records {
        let key = (
            r.method.clone(),
            r.dataset.clone(),
            r.m,
            r.n_train,
            format_float(r.keep_fraction),
        );
        let group = match groups.iter_mut().find(|g| g.key == key) {
            Some(g) => g,
            None => {
                groups.push(GroupStats {
                    key,
                    runs: 0,
                    failed: 0,
                    accuracies: Vec::new(),
                });
                groups.last_mut().expect("just pushed")
            }
        };
        group.runs += 1;
        if r.accuracy.is_finite() {
            group.accuracies.push(r.accuracy);
        } else {
            group.failed += 1;
        }
    }
    let mut out = String::new();
    out.push_str(
        "method,dataset,m,n_train,keep_fraction,runs,failed,mean_accuracy,median_accuracy,std_accuracy\n",
    );
    for g in &groups {
        let (mean, med, std) = if g.accuracies.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mut sorted = g.accuracies.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
            (mean, median(&sorted), std_dev(&sorted, mean))
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            g.key.0,
            g.key.1,
            g.key.2,
            g.key.3,
            g.key.4,
            g.runs,
            g.failed,
            format_float(mean),
            format_float(med),
            format_float(std)
        );
    }
    out
}

/// Writes the record CSV to `path` and the summary companion next to it
/// at `<stem>_summary.csv`. Empty record sets are an error.
pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> io::Result<()> {
    if records.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no records to write",
        ));
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, render_csv(records))?;
    let summary_path = summary_path_for(path);
    fs::write(summary_path, render_summary(records))?;
    Ok(())
}

/// `<stem>_summary.csv` next to `path`.
pub fn summary_path_for(path: &Path) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    path.with_file_name(format!("{stem}_summary.csv"))
}
