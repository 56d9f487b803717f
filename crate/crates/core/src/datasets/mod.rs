//! Dataset ingestion and the small-data protocol.
//!
//! Two on-disk layouts are supported:
//!
//! - **IDX** (MNIST): big-endian header, image magic `0x00000803`, label
//!   magic `0x00000801`, unsigned-byte pixels.
//! - **CIFAR-10 binary**: 3073-byte records, one label byte followed by 1024
//!   red, 1024 green and 1024 blue bytes, each plane 32×32 row-major.
//!
//! SVHN is read through either layout after an offline conversion.

mod cifar;
mod idx;
mod preprocess;
mod subsample;

use serde::{Deserialize, Serialize};

pub use cifar::{load_cifar10_bin, write_cifar10_bin, CIFAR_RECORD_LEN};
pub use idx::{load_idx, write_idx, IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC};
pub use preprocess::{compute_norm_stats, normalize, pad_to_32, NormStats, STD_FLOOR};
pub use subsample::{subsample_per_class, SubsampleSpec, DEFAULT_PER_CLASS};

use crate::error::{Error, Result};
use crate::numerics::Tensor;

pub const NUM_CLASSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// Image batch `[N, C, H, W]` with one class label per image.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    pub images: Tensor,
    pub labels: Vec<u8>,
    pub name: String,
    pub split: Split,
}

impl LabeledDataset {
    pub fn new(images: Tensor, labels: Vec<u8>, name: impl Into<String>, split: Split) -> Result<Self> {
        images.expect_rank("dataset", 4)?;
        if images.shape()[0] != labels.len() {
            return Err(Error::CountMismatch { images: images.shape()[0], labels: labels.len() });
        }
        if let Some(bad) = labels.iter().position(|&l| l as usize >= NUM_CLASSES) {
            return Err(Error::invalid(
                "dataset",
                format!("label {} at index {bad} is not below {NUM_CLASSES}", labels[bad]),
            ));
        }
        Ok(LabeledDataset { images, labels, name: name.into(), split })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.images.shape()[1]
    }

    pub fn height(&self) -> usize {
        self.images.shape()[2]
    }

    pub fn width(&self) -> usize {
        self.images.shape()[3]
    }

    pub fn image_len(&self) -> usize {
        self.channels() * self.height() * self.width()
    }

    /// Flat `[C, H, W]` pixels of image `i`.
    pub fn image(&self, i: usize) -> &[f64] {
        let n = self.image_len();
        &self.images.data()[i * n..(i + 1) * n]
    }

    pub fn image_tensor(&self, i: usize) -> Tensor {
        Tensor::new(self.images.shape()[1..].to_vec(), self.image(i).to_vec()).expect("image shape")
    }

    pub fn class_histogram(&self) -> [usize; NUM_CLASSES] {
        let mut h = [0; NUM_CLASSES];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    /// New dataset holding images `indices` in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let n = self.image_len();
        let mut data = Vec::with_capacity(indices.len() * n);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.image(i));
            labels.push(self.labels[i]);
        }
        let mut shape = self.images.shape().to_vec();
        shape[0] = indices.len();
        LabeledDataset::new(Tensor::new(shape, data)?, labels, self.name.clone(), self.split)
    }
}
