//! Loads MNIST, draws the 38-per-class training subset and prints what the
//! network will actually see.
//!
//! Expects the four IDX files under `$SYNAPTOGEN_DATA_DIR/mnist` (default
//! `data/mnist`).

use synaptogen::cli::load_dataset;
use synaptogen::config::{DatasetKind, Settings, DATA_DIR_ENV};
use synaptogen::experiment::{prepare_run_data, subset_seed};

fn main() -> synaptogen::Result<()> {
    let mut settings = Settings::default();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        settings.data_dir = dir.into();
    }
    let data = load_dataset(DatasetKind::Mnist, &settings)?;
    println!("train {:?}, test {:?}", data.train.images.shape(), data.test.images.shape());

    let seed = subset_seed(0, "mnist", 0, true);
    let (train, test) = prepare_run_data(&data, 38, seed)?;
    println!("subset {:?}, histogram {:?}", train.images.shape(), train.class_histogram());

    let first = train.image(0);
    let mean = first.iter().sum::<f64>() / first.len() as f64;
    println!("first normalised image: label {}, mean {mean:.3}", train.labels[0]);
    println!("test split normalised with the subset statistics: {} images", test.len());
    Ok(())
}
