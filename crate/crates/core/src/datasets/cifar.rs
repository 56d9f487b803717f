use std::fs;
use std::path::Path;

use crate::datasets::{LabeledDataset, Split};
use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// One label byte plus a 3×32×32 channel-major image.
pub const CIFAR_RECORD_LEN: usize = 1 + 3 * 32 * 32;

/// Concatenates CIFAR-10 binary batch files into one `[N, 3, 32, 32]`
/// dataset, in file order.
pub fn load_cifar10_bin<P: AsRef<Path>>(paths: &[P]) -> Result<LabeledDataset> {
    if paths.is_empty() {
        return Err(Error::invalid("load_cifar10_bin", "no batch files given"));
    }
    let mut pixels = Vec::new();
    let mut labels = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.is_empty() || bytes.len() % CIFAR_RECORD_LEN != 0 {
            return Err(Error::BadRecordLength {
                path: path.to_path_buf(),
                len: bytes.len(),
                record: CIFAR_RECORD_LEN,
            });
        }
        for (index, record) in bytes.chunks_exact(CIFAR_RECORD_LEN).enumerate() {
            if record[0] >= 10 {
                return Err(Error::BadLabel { path: path.to_path_buf(), index, label: record[0] });
            }
            labels.push(record[0]);
            pixels.extend(record[1..].iter().map(|&b| f64::from(b)));
        }
    }
    let first = paths[0].as_ref();
    let file = first.file_name().map(|f| f.to_string_lossy().to_lowercase()).unwrap_or_default();
    let split = if file.contains("test") { Split::Test } else { Split::Train };
    let name = first
        .parent()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cifar10".to_string());
    let images = Tensor::new(vec![labels.len(), 3, 32, 32], pixels)?;
    LabeledDataset::new(images, labels, name, split)
}

/// Writes a `[N, 3, 32, 32]` dataset in the CIFAR-10 binary layout.
pub fn write_cifar10_bin(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    if dataset.images.shape()[1..] != [3, 32, 32] {
        return Err(Error::shape(
            "write_cifar10_bin",
            "images [N, 3, 32, 32]",
            format!("{:?}", dataset.images.shape()),
        ));
    }
    let mut bytes = Vec::with_capacity(dataset.len() * CIFAR_RECORD_LEN);
    for i in 0..dataset.len() {
        bytes.push(dataset.labels[i]);
        bytes.extend(dataset.image(i).iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    }
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
