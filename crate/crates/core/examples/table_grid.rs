//! Runs a reduced grid (all four arms, two seeds, a few epochs) on MNIST and
//! prints the result table. Pass `--full` for the default 60-epoch,
//! three-seed protocol.

use synaptogen::cli::{load_dataset, render_markdown_table};
use synaptogen::config::{DatasetKind, Settings, DATA_DIR_ENV};
use synaptogen::experiment::run_experiment;

fn main() -> synaptogen::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut settings = Settings::default();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        settings.data_dir = dir.into();
    }
    if !full {
        settings.epochs = 5;
        settings.n_runs = 2;
    }
    let datasets = [DatasetKind::Mnist];
    let data = vec![load_dataset(DatasetKind::Mnist, &settings)?];
    let spec = settings.experiment_spec();
    let results = run_experiment(&data, &spec)?;
    print!("{}", render_markdown_table(&datasets, &spec.arms, &results));
    for r in &results {
        println!("{:<16} per-seed {:?}", r.arm, r.per_seed_accuracy());
    }
    Ok(())
}
