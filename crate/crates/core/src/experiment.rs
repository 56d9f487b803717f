//! The seeded comparison grid: datasets × arms × runs.
//!
//! Every run of a cell derives two seeds from the base seed:
//!
//! - the subset seed `derive_seed(base, [hash(dataset), run])` picks the
//!   38-per-class training subset, shared by every arm of that run so arms
//!   are compared on identical data;
//! - the model seed `derive_seed(base, [hash(dataset), hash(arm), run])`
//!   drives weight sampling, initialisation and the epoch shuffles.
//!
//! Results are keyed by cell position, never by completion order, so the
//! grid is identical whether cells run sequentially or concurrently.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{
    compute_norm_stats, normalize, pad_to_32, subsample_per_class, LabeledDataset, SubsampleSpec, DEFAULT_PER_CLASS,
};
use crate::error::{Error, Result};
use crate::model::{build_model, evaluate, train, Arm, History, TrainConfig};
use crate::numerics::{derive_seed, hash_label, Rng};
use crate::synapse_gen::SynapseDistribution;

/// A dataset's raw (un-normalised) train and test splits.
#[derive(Clone, Debug)]
pub struct DatasetSplits {
    pub name: String,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

impl DatasetSplits {
    /// Pads 28×28 splits to 32×32. The training split is padded lazily per
    /// subset, so only the test split is touched here.
    pub fn new(name: impl Into<String>, train: LabeledDataset, test: LabeledDataset) -> Result<Self> {
        let test = pad_if_needed(&test)?;
        Ok(DatasetSplits { name: name.into(), train, test })
    }
}

fn pad_if_needed(data: &LabeledDataset) -> Result<LabeledDataset> {
    if data.height() == 28 && data.width() == 28 {
        pad_to_32(data)
    } else {
        Ok(data.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Training settings shared by every cell; `arm` and `seed` are replaced
    /// per run.
    pub base: TrainConfig,
    pub arms: Vec<Arm>,
    pub n_runs: usize,
    pub base_seed: u64,
    pub per_class: usize,
    /// Draw a fresh training subset for every run (otherwise run 0's subset
    /// is reused).
    pub resample_subset: bool,
    /// Upper bound on concurrently running cells.
    pub jobs: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            base: TrainConfig::default(),
            arms: default_arms(),
            n_runs: 3,
            base_seed: 0,
            per_class: DEFAULT_PER_CLASS,
            resample_subset: true,
            jobs: 1,
        }
    }
}

/// Normal, Log-Normal, Center-Surround and Fully Trained, with default
/// parameters.
pub fn default_arms() -> Vec<Arm> {
    vec![
        Arm::Sampled(SynapseDistribution::Normal),
        Arm::Sampled(SynapseDistribution::lognormal()),
        Arm::Sampled(SynapseDistribution::center_surround()),
        Arm::FullyTrained,
    ]
}

pub fn subset_seed(base_seed: u64, dataset: &str, run: usize, resample: bool) -> u64 {
    let run = if resample { run as u64 } else { 0 };
    derive_seed(base_seed, &[hash_label(dataset), run])
}

pub fn model_seed(base_seed: u64, dataset: &str, arm: &str, run: usize) -> u64 {
    derive_seed(base_seed, &[hash_label(dataset), hash_label(arm), run as u64])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub subset_seed: u64,
    pub model_seed: u64,
    /// Test accuracy as a fraction.
    pub accuracy: f64,
    pub history: History,
    pub test_size: usize,
    pub duration_s: f64,
}

/// One (dataset, arm) cell: per-run accuracies and their aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub dataset: String,
    pub arm: String,
    pub runs: Vec<RunRecord>,
    /// Set when a run failed; the runs recorded before it are kept.
    pub failure: Option<String>,
}

impl ExperimentResult {
    pub fn per_seed_accuracy(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.accuracy).collect()
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn mean_percent(&self) -> f64 {
        mean_percent(&self.per_seed_accuracy())
    }

    pub fn std_percent(&self) -> f64 {
        population_std_percent(&self.per_seed_accuracy())
    }
}

/// Mean of fractional accuracies, in percent.
pub fn mean_percent(accuracies: &[f64]) -> f64 {
    100.0 * accuracies.iter().sum::<f64>() / accuracies.len() as f64
}

/// Population (divisor N) standard deviation of fractional accuracies, in
/// percent.
pub fn population_std_percent(accuracies: &[f64]) -> f64 {
    let m = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let var = accuracies.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / accuracies.len() as f64;
    100.0 * var.sqrt()
}

/// Formats with two decimals, rounding half to even.
pub fn format_two_decimals(value: f64) -> String {
    let scaled = (value * 100.0).round_ties_even();
    format!("{:.2}", scaled / 100.0)
}

/// Subsample, pad, and normalise train and test with the subset statistics.
pub fn prepare_run_data(data: &DatasetSplits, per_class: usize, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let subset = pad_if_needed(&subsample_per_class(&data.train, &SubsampleSpec::new(per_class, seed))?)?;
    let stats = compute_norm_stats(&subset);
    Ok((normalize(&subset, &stats)?, normalize(&data.test, &stats)?))
}

/// Trains and evaluates run `run` of one cell.
pub fn run_once(data: &DatasetSplits, arm: &Arm, run: usize, spec: &ExperimentSpec) -> Result<RunRecord> {
    let started = Instant::now();
    let subset_seed = subset_seed(spec.base_seed, &data.name, run, spec.resample_subset);
    let model_seed = model_seed(spec.base_seed, &data.name, arm.name(), run);
    let (trainset, testset) = prepare_run_data(data, spec.per_class, subset_seed)?;

    let config = TrainConfig { arm: *arm, seed: model_seed, ..spec.base.clone() };
    let mut rng = Rng::seed_from_u64(model_seed);
    let model = build_model(&config, trainset.channels(), &mut rng)?;
    let (trained, history) = train(&model, &trainset, &config)?;
    if model.conv.frozen && !trained.conv.weights.bitwise_eq(&model.conv.weights) {
        return Err(Error::invalid("run_once", "frozen conv bank changed during training"));
    }
    let accuracy = evaluate(&trained, &testset)?;
    let duration_s = started.elapsed().as_secs_f64();
    log::info!("{} {} run {run}: accuracy {:.4} ({duration_s:.1}s)", data.name, arm.name(), accuracy);
    Ok(RunRecord { run, subset_seed, model_seed, accuracy, history, test_size: testset.len(), duration_s })
}

fn run_cell(data: &DatasetSplits, arm: &Arm, spec: &ExperimentSpec) -> ExperimentResult {
    let mut result = ExperimentResult {
        dataset: data.name.clone(),
        arm: arm.name().to_string(),
        runs: Vec::with_capacity(spec.n_runs),
        failure: None,
    };
    for run in 0..spec.n_runs {
        match run_once(data, arm, run, spec) {
            Ok(record) => result.runs.push(record),
            Err(e) => {
                log::warn!("{} {} run {run} failed: {e}", data.name, arm.name());
                result.failure = Some(format!("run {run}: {e}"));
                break;
            }
        }
    }
    result
}

/// Runs every (dataset, arm) cell `spec.n_runs` times. A failing run marks
/// its cell failed without stopping the rest of the grid. Results come back
/// dataset-major in the order given.
pub fn run_experiment(datasets: &[DatasetSplits], spec: &ExperimentSpec) -> Result<Vec<ExperimentResult>> {
    if spec.n_runs == 0 {
        return Err(Error::invalid("run_experiment", "n_runs must be at least 1"));
    }
    spec.base.validate()?;
    let cells: Vec<(&DatasetSplits, &Arm)> =
        datasets.iter().flat_map(|d| spec.arms.iter().map(move |a| (d, a))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::invalid("run_experiment", e.to_string()))?;
    Ok(pool.install(|| cells.par_iter().map(|(d, a)| run_cell(d, a, spec)).collect()))
}
