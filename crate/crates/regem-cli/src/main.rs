//! Experiment driver. Exit codes: 0 success, 1 configuration error,
//! 2 data or IO error, 3 numerical failure (fit verb only). Sweep verbs
//! record per-run failures in the output instead of aborting.

use clap::{Args, Parser, Subcommand};
use regem::data::generate_gmm;
use regem::data::SyntheticSpec;
use regem::rng::{mix_seed, stream};
use regem_cli::config::{ConfigError, ExperimentConfig, ExperimentKind};
use regem_cli::csvout::{emit_csv, format_float, summary_path_for};
use regem_cli::experiments::{
    run_real_accuracy, run_real_starvation, run_single_fit, run_synthetic_sweep, RunError,
};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "regem", version, about = "Clustering experiments with shrinkage-regularized mixture estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one synthetic dataset as CSV (x0..x{m-1},label).
    Generate(CommonArgs),
    /// Fit one method once and print a report.
    Fit(CommonArgs),
    /// Accuracy versus dimension on synthetic mixtures.
    SweepDim(CommonArgs),
    /// Held-out accuracy on a real dataset.
    RealAcc(CommonArgs),
    /// Held-out accuracy under training-set subsampling.
    RealStarve(CommonArgs),
}

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn run_error_exit(e: RunError) -> ExitCode {
    match e {
        RunError::Setup(_) => fail(EXIT_CONFIG, e),
        RunError::Data(_) | RunError::Io(_) => fail(EXIT_DATA, e),
        RunError::Numerical(_) => fail(EXIT_NUMERICAL, e),
    }
}

fn load_config(args: &CommonArgs, expected: Option<ExperimentKind>) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    cfg.validate()?;
    if let Some(kind) = expected {
        if cfg.kind != kind {
            return Err(ConfigError(format!(
                "config kind {:?} does not match this verb",
                cfg.kind
            )));
        }
    }
    Ok(cfg)
}

fn emit(records: &[regem_cli::csvout::ExperimentRecord], cfg: &ExperimentConfig) -> Result<(), RunError> {
    emit_csv(records, &cfg.output)?;
    eprintln!(
        "wrote {} records to {} (summary: {})",
        records.len(),
        cfg.output.display(),
        summary_path_for(&cfg.output).display()
    );
    Ok(())
}

fn cmd_sweep(args: &CommonArgs, kind: ExperimentKind) -> ExitCode {
    let cfg = match load_config(args, Some(kind)) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let outcome = match kind {
        ExperimentKind::SyntheticDimSweep => run_synthetic_sweep(&cfg),
        ExperimentKind::RealAccuracy => run_real_accuracy(&cfg),
        ExperimentKind::RealStarvation => run_real_starvation(&cfg),
        ExperimentKind::SingleFit => unreachable!("fit handled separately"),
    };
    match outcome.and_then(|records| emit(&records, &cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => run_error_exit(e),
    }
}

fn cmd_generate(args: &CommonArgs) -> ExitCode {
    // Generation needs only the [synthetic] block, so any kind is
    // accepted; the first sweep dimension is the one generated.
    let cfg = match load_config(args, None) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let Some(synth) = &cfg.synthetic else {
        return fail(EXIT_CONFIG, "generate needs a [synthetic] block");
    };
    let Some(&m) = synth.dims.first() else {
        return fail(EXIT_CONFIG, "synthetic.dims must be nonempty");
    };
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
    let data = match generate_gmm(&spec) {
        Ok(data) => data,
        Err(e) => return fail(EXIT_DATA, e),
    };
    let labels = data.labels.as_ref().expect("generator labels");
    let mut out = String::new();
    for j in 0..data.m() {
        let _ = write!(out, "x{j},");
    }
    out.push_str("label\n");
    for i in 0..data.n() {
        for j in 0..data.m() {
            let _ = write!(out, "{},", format_float(data.values[[i, j]]));
        }
        let _ = writeln!(out, "{}", labels[i]);
    }
    if let Some(parent) = cfg.output.parent() {
        if !parent.as_os_str().is_empty() {
            if let Err(e) = std::fs::create_dir_all(parent) {
                return fail(EXIT_DATA, e);
            }
        }
    }
    match std::fs::write(&cfg.output, out) {
        Ok(()) => {
            eprintln!(
                "wrote {} rows x {} features to {}",
                data.n(),
                data.m(),
                cfg.output.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_DATA, e),
    }
}

fn cmd_fit(args: &CommonArgs) -> ExitCode {
    let cfg = match load_config(args, Some(ExperimentKind::SingleFit)) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = match run_single_fit(&cfg) {
        Ok(report) => report,
        Err(e) => return run_error_exit(e),
    };
    println!(
        "method={} dataset={} n={} m={} k={}",
        report.method, report.dataset, report.n, report.m, report.k
    );
    println!(
        "iterations={} wall_ms={:.1}",
        report.iterations, report.wall_ms
    );
    if let Some(acc) = report.accuracy {
        println!("accuracy={acc:.4}");
    }
    for (k, c) in report.conditioning.iter().enumerate() {
        println!(
            "cluster {k}: min_eig={:.6e} max_eig={:.6e} condition={:.3e}",
            c.min_eig, c.max_eig, c.condition
        );
    }
    if !report.etas.is_empty() {
        let etas = report
            .etas
            .iter()
            .map(|&e| format!("{e:.6e}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!("shrinkage strengths: [{etas}]");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::SweepDim(args) => cmd_sweep(args, ExperimentKind::SyntheticDimSweep),
        Command::RealAcc(args) => cmd_sweep(args, ExperimentKind::RealAccuracy),
        Command::RealStarve(args) => cmd_sweep(args, ExperimentKind::RealStarvation),
    }
}
