use std::fs::File;
use std::hash::Hasher;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::config::{DatasetKind, Settings, SvhnFormat};
use crate::datasets::{load_cifar10_bin, load_idx, LabeledDataset};
use crate::error::{Error, Result};
use crate::experiment::DatasetSplits;

enum Layout {
    Idx { train: [PathBuf; 2], test: [PathBuf; 2] },
    Cifar { train: Vec<PathBuf>, test: Vec<PathBuf> },
}

impl Layout {
    fn files(&self) -> Vec<&PathBuf> {
        match self {
            Layout::Idx { train, test } => train.iter().chain(test).collect(),
            Layout::Cifar { train, test } => train.iter().chain(test).collect(),
        }
    }
}

fn idx_layout(dir: &Path, train_prefix: &str, test_prefix: &str) -> Layout {
    let pair = |prefix: &str| {
        [dir.join(format!("{prefix}-images-idx3-ubyte")), dir.join(format!("{prefix}-labels-idx1-ubyte"))]
    };
    Layout::Idx { train: pair(train_prefix), test: pair(test_prefix) }
}

fn layout(kind: DatasetKind, settings: &Settings) -> Layout {
    let dir = settings.data_dir.join(kind.name());
    match kind {
        DatasetKind::Mnist => idx_layout(&dir, "train", "t10k"),
        DatasetKind::Cifar10 => {
            let nested = dir.join("cifar-10-batches-bin");
            let dir = if nested.is_dir() { nested } else { dir };
            Layout::Cifar {
                train: (1..=5).map(|i| dir.join(format!("data_batch_{i}.bin"))).collect(),
                test: vec![dir.join("test_batch.bin")],
            }
        }
        DatasetKind::Svhn => match settings.svhn_format {
            SvhnFormat::Cifar => Layout::Cifar { train: vec![dir.join("train.bin")], test: vec![dir.join("test.bin")] },
            SvhnFormat::Idx => idx_layout(&dir, "train", "test"),
        },
    }
}

/// Every file a dataset is read from, train files first.
pub fn dataset_files(kind: DatasetKind, settings: &Settings) -> Vec<PathBuf> {
    layout(kind, settings).files().into_iter().cloned().collect()
}

/// Fails with a not-found I/O error naming the first missing file.
pub fn check_present(kind: DatasetKind, settings: &Settings) -> Result<()> {
    for path in dataset_files(kind, settings) {
        if !path.is_file() {
            return Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "dataset file not found")));
        }
    }
    Ok(())
}

fn renamed(mut data: LabeledDataset, kind: DatasetKind) -> LabeledDataset {
    data.name = kind.name().to_string();
    data
}

pub fn load_dataset(kind: DatasetKind, settings: &Settings) -> Result<DatasetSplits> {
    check_present(kind, settings)?;
    let (train, test) = match layout(kind, settings) {
        Layout::Idx { train, test } => (load_idx(&train[0], &train[1])?, load_idx(&test[0], &test[1])?),
        Layout::Cifar { train, test } => (load_cifar10_bin(&train)?, load_cifar10_bin(&test)?),
    };
    DatasetSplits::new(kind.name(), renamed(train, kind), renamed(test, kind))
}

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = fnv::FnvHasher::default();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.write(&buf[..n]);
    }
    Ok(format!("{:016x}", hasher.finish()))
}
