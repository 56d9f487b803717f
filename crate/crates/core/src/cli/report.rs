use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{DatasetKind, Settings};
use crate::error::{Error, Result};
use crate::experiment::{format_two_decimals, ExperimentResult, RunRecord};
use crate::model::Arm;

/// Everything needed to reproduce and audit a `run` or `experiment`
/// invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub created_utc: String,
    pub settings: Settings,
    /// File path → 64-bit FNV-1a digest.
    pub dataset_digests: BTreeMap<String, String>,
    pub cells: Vec<ManifestCell>,
    pub total_duration_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestCell {
    pub dataset: String,
    pub arm: String,
    pub runs: Vec<RunRecord>,
    pub mean_percent: Option<f64>,
    pub std_percent: Option<f64>,
    pub failure: Option<String>,
}

impl From<&ExperimentResult> for ManifestCell {
    fn from(r: &ExperimentResult) -> Self {
        let ok = !r.failed() && !r.runs.is_empty();
        ManifestCell {
            dataset: r.dataset.clone(),
            arm: r.arm.clone(),
            runs: r.runs.clone(),
            mean_percent: ok.then(|| r.mean_percent()),
            std_percent: ok.then(|| r.std_percent()),
            failure: r.failure.clone(),
        }
    }
}

/// `mean ± std` in percent with two decimals, or `FAIL`.
pub fn format_cell(result: &ExperimentResult) -> String {
    if result.failed() || result.runs.is_empty() {
        "FAIL".to_string()
    } else {
        format!("{} ± {}", format_two_decimals(result.mean_percent()), format_two_decimals(result.std_percent()))
    }
}

/// Rows are datasets, columns arms, in the order given.
pub fn render_markdown_table(datasets: &[DatasetKind], arms: &[Arm], results: &[ExperimentResult]) -> String {
    let mut out = String::from("| Dataset |");
    for arm in arms {
        out.push_str(&format!(" {} |", arm.title()));
    }
    out.push_str("\n| --- |");
    out.push_str(&" --- |".repeat(arms.len()));
    out.push('\n');
    for ds in datasets {
        out.push_str(&format!("| {} |", ds.title()));
        for arm in arms {
            let cell = results
                .iter()
                .find(|r| r.dataset == ds.name() && r.arm == arm.name())
                .map_or_else(|| "FAIL".to_string(), format_cell);
            out.push_str(&format!(" {cell} |"));
        }
        out.push('\n');
    }
    out
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, e.into())
}

/// One row per completed run: `dataset,arm,seed,accuracy`, where `seed` is
/// the run's model seed and `accuracy` the full-precision test fraction.
pub fn write_results_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["dataset", "arm", "seed", "accuracy"]).map_err(csv_err(path))?;
    for r in results {
        for run in &r.runs {
            w.write_record([r.dataset.clone(), r.arm.clone(), run.model_seed.to_string(), run.accuracy.to_string()])
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per cell with the aggregate and every per-run accuracy, so the
/// mean column can be recomputed from the run columns.
pub fn write_summary_csv(results: &[ExperimentResult], n_runs: usize, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header =
        vec!["dataset".to_string(), "arm".into(), "status".into(), "mean_percent".into(), "std_percent".into()];
    header.extend((0..n_runs).map(|i| format!("accuracy_run{i}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for r in results {
        let ok = !r.failed() && !r.runs.is_empty();
        let mut row = vec![
            r.dataset.clone(),
            r.arm.clone(),
            if ok { "ok".into() } else { "FAIL".into() },
            if ok { r.mean_percent().to_string() } else { String::new() },
            if ok { r.std_percent().to_string() } else { String::new() },
        ];
        row.extend((0..n_runs).map(|i| r.runs.get(i).map(|run| run.accuracy.to_string()).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::io(path, e.into()))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}
