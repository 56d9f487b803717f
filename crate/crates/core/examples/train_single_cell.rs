//! Trains one arm on the MNIST subset and reports the loss curve and test
//! accuracy.
//!
//! ```text
//! cargo run --release --example train_single_cell -- --arm lognormal --scale --lr 0.001
//! ```

use clap::Parser;
use synaptogen::cli::load_dataset;
use synaptogen::config::{ArmKind, Settings, DATA_DIR_ENV};
use synaptogen::experiment::{run_once, ExperimentSpec};

#[derive(Parser)]
struct Args {
    #[arg(long, default_value = "normal")]
    arm: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 60)]
    epochs: usize,
    /// Divide each sampled kernel by sqrt(fan_in * E[w^2]).
    #[arg(long)]
    scale: bool,
}

fn main() -> synaptogen::Result<()> {
    let args = Args::parse();
    let mut settings = Settings::default();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        settings.data_dir = dir.into();
    }
    settings.base_seed = args.seed;
    settings.learning_rate = args.lr;
    settings.epochs = args.epochs;
    settings.scale_to_unit_fanin = args.scale;
    let kind: ArmKind = args.arm.parse().expect("arm name");

    let data = load_dataset(synaptogen::config::DatasetKind::Mnist, &settings)?;
    let spec: ExperimentSpec = settings.experiment_spec();
    let record = run_once(&data, &settings.arm(kind), 0, &spec)?;

    for (epoch, e) in record.history.epochs.iter().enumerate() {
        if epoch % 10 == 0 || epoch + 1 == record.history.epochs.len() {
            println!("epoch {epoch:>3}  loss {:>9.4}  train acc {:.3}", e.loss, e.train_accuracy);
        }
    }
    println!(
        "{}: test accuracy {:.2}% over {} images ({:.1}s)",
        args.arm,
        100.0 * record.accuracy,
        record.test_size,
        record.duration_s
    );
    Ok(())
}
