//! `synaptogen sample | run | experiment`.
//!
//! Exit codes: 0 success, 1 missing input or I/O failure, 2 bad usage or
//! configuration, 3 failed training run (for `experiment`: at least one cell
//! failed).

mod data;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use data::{check_present, dataset_files, file_digest, load_dataset};
pub use report::{
    format_cell, render_markdown_table, write_manifest, write_results_csv, write_summary_csv, ManifestCell, RunManifest,
};

use crate::config::{parse_list, ArmKind, ConfigError, DatasetKind, Settings, DATA_DIR_ENV};
use crate::error::Error;
use crate::experiment::{format_two_decimals, run_experiment, run_once, ExperimentResult};
use crate::synapse_gen::{export_kernels_pgm, generate_kernel_bank, kernel_stats, write_stats_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISSING_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL_FAILURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "synaptogen",
    version,
    about = "Frozen random-feature CNNs with biologically inspired synaptic strengths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one kernel bank and dump it as PGM images plus stats.csv.
    Sample(SampleArgs),
    /// Train and evaluate a single (dataset, arm, seed) cell.
    Run(RunArgs),
    /// Run the full datasets × arms grid over several seeds.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    /// Maximum number of concurrently running cells.
    #[arg(long)]
    jobs: Option<usize>,
    /// Dataset root (overrides SYNAPTOGEN_DATA_DIR).
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// normal | lognormal | center-surround
    #[arg(long)]
    dist: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    channels: usize,
    #[arg(long, default_value_t = 64)]
    kernels: usize,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    arm: String,
    /// Base seed; the run reproduces run 0 of the same cell in `experiment`.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Comma-separated subset of mnist,cifar10,svhn.
    #[arg(long)]
    datasets: Option<String>,
    /// Comma-separated subset of normal,lognormal,center-surround,fully-trained.
    #[arg(long)]
    arms: Option<String>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Runs per cell.
    #[arg(long)]
    runs: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::InvalidDistribution(_) => EXIT_USAGE,
            Error::NonFiniteLoss { .. } => EXIT_PARTIAL_FAILURE,
            _ => EXIT_MISSING_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Run(args) => cmd_run(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn base_settings(config: Option<&Path>) -> Result<Settings, Failure> {
    let mut settings = Settings::default();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        settings.data_dir = PathBuf::from(dir);
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        settings.apply_text(&text)?;
    }
    Ok(settings)
}

/// Defaults, then `$SYNAPTOGEN_DATA_DIR`, then the config file, then flags.
fn resolve(common: &CommonArgs) -> Result<Settings, Failure> {
    let mut s = base_settings(common.config.as_deref())?;
    if let Some(v) = common.per_class {
        s.per_class = v;
    }
    if let Some(v) = common.epochs {
        s.epochs = v;
    }
    if let Some(v) = common.lr {
        s.learning_rate = v;
    }
    if let Some(v) = common.momentum {
        s.momentum = v;
    }
    if let Some(v) = common.batch {
        s.batch_size = v;
    }
    if let Some(v) = common.jobs {
        s.jobs = v;
    }
    if let Some(v) = &common.data_dir {
        s.data_dir = v.clone();
    }
    Ok(s)
}

fn timestamped_dir(root: &Path) -> Result<PathBuf, Failure> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let mut dir = root.join(&stamp);
    let mut n = 1;
    while dir.exists() {
        dir = root.join(format!("{stamp}-{n}"));
        n += 1;
    }
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn digests(kinds: &[DatasetKind], settings: &Settings) -> Result<std::collections::BTreeMap<String, String>, Failure> {
    let mut out = std::collections::BTreeMap::new();
    for &kind in kinds {
        for path in dataset_files(kind, settings) {
            out.insert(path.display().to_string(), file_digest(&path)?);
        }
    }
    Ok(out)
}

fn cmd_sample(args: SampleArgs) -> Result<i32, Failure> {
    let settings = base_settings(args.config.as_deref())?;
    settings.validate()?;
    let kind: ArmKind = args.dist.parse().map_err(|e: String| Failure { code: EXIT_USAGE, message: e })?;
    let dist = settings.distribution(kind).ok_or_else(|| Failure {
        code: EXIT_USAGE,
        message: "`fully-trained` is not a sampling distribution".to_string(),
    })?;
    if !(1..=3).contains(&args.channels) || args.kernels == 0 {
        return Err(Failure {
            code: EXIT_USAGE,
            message: "--channels must be 1..=3 and --kernels positive".to_string(),
        });
    }
    let bank = generate_kernel_bank(&dist, args.kernels, args.channels, args.seed)?;
    let files = export_kernels_pgm(&bank, &args.out)?;
    let stats = kernel_stats(&bank);
    let id = format!("{}-seed{}", dist.name(), args.seed);
    write_stats_csv(&[(id.clone(), stats.clone())], args.out.join("stats.csv"))?;
    println!(
        "{id}: {} weights, mean {:.6}, var {:.6}, min {:.6}, max {:.6}; wrote {} PGM files to {}",
        stats.count,
        stats.mean,
        stats.variance,
        stats.min,
        stats.max,
        files.len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn parse_arg<T>(value: &str) -> Result<T, Failure>
where
    T: std::str::FromStr<Err = String>,
{
    value.parse().map_err(|e: String| Failure { code: EXIT_USAGE, message: e })
}

fn cmd_run(args: RunArgs) -> Result<i32, Failure> {
    let mut settings = resolve(&args.common)?;
    let kind: DatasetKind = parse_arg(&args.dataset)?;
    let arm_kind: ArmKind = parse_arg(&args.arm)?;
    if let Some(seed) = args.seed {
        settings.base_seed = seed;
    }
    settings.datasets = vec![kind];
    settings.arms = vec![arm_kind];
    settings.n_runs = 1;
    settings.validate()?;

    let started = Instant::now();
    let data = load_dataset(kind, &settings)?;
    let spec = settings.experiment_spec();
    let arm = settings.arm(arm_kind);
    let (result, code) = match run_once(&data, &arm, 0, &spec) {
        Ok(record) => {
            println!(
                "{} {} {} {}%",
                kind.name(),
                arm.name(),
                settings.base_seed,
                format_two_decimals(100.0 * record.accuracy)
            );
            let r = ExperimentResult {
                dataset: kind.name().into(),
                arm: arm.name().into(),
                runs: vec![record],
                failure: None,
            };
            (r, EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let r = ExperimentResult {
                dataset: kind.name().into(),
                arm: arm.name().into(),
                runs: Vec::new(),
                failure: Some(e.to_string()),
            };
            (r, EXIT_PARTIAL_FAILURE)
        }
    };
    let dir = timestamped_dir(&args.common.out)?;
    write_results_csv(std::slice::from_ref(&result), &dir.join("results.csv"))?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: "run".into(),
        created_utc: chrono::Utc::now().to_rfc3339(),
        dataset_digests: digests(&[kind], &settings)?,
        settings,
        cells: vec![ManifestCell::from(&result)],
        total_duration_s: started.elapsed().as_secs_f64(),
    };
    write_manifest(&manifest, &dir.join("manifest.json"))?;
    Ok(code)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32, Failure> {
    let mut settings = resolve(&args.common)?;
    if let Some(list) = &args.datasets {
        settings.datasets = parse_list("datasets", list)?;
    }
    if let Some(list) = &args.arms {
        settings.arms = parse_list("arms", list)?;
    }
    if let Some(seed) = args.base_seed {
        settings.base_seed = seed;
    }
    if let Some(runs) = args.runs {
        settings.n_runs = runs;
    }
    settings.validate()?;

    let started = Instant::now();
    for &kind in &settings.datasets {
        check_present(kind, &settings)?;
    }
    let data = settings.datasets.iter().map(|&k| load_dataset(k, &settings)).collect::<Result<Vec<_>, _>>()?;
    let spec = settings.experiment_spec();
    let results = run_experiment(&data, &spec)?;

    let dir = timestamped_dir(&args.common.out)?;
    let table = render_markdown_table(&settings.datasets, &spec.arms, &results);
    std::fs::write(dir.join("table.md"), &table).map_err(|e| Error::io(dir.join("table.md"), e))?;
    write_results_csv(&results, &dir.join("results.csv"))?;
    write_summary_csv(&results, settings.n_runs, &dir.join("summary.csv"))?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: "experiment".into(),
        created_utc: chrono::Utc::now().to_rfc3339(),
        dataset_digests: digests(&settings.datasets, &settings)?,
        settings,
        cells: results.iter().map(ManifestCell::from).collect(),
        total_duration_s: started.elapsed().as_secs_f64(),
    };
    write_manifest(&manifest, &dir.join("manifest.json"))?;
    print!("{table}");
    println!("results written to {}", dir.display());

    Ok(if results.iter().any(|r| r.failed()) { EXIT_PARTIAL_FAILURE } else { EXIT_OK })
}
