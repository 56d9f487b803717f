use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Lower bound applied to every per-channel standard deviation.
pub const STD_FLOOR: f64 = 1e-6;

/// Per-channel mean and standard deviation of pixels scaled to `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn compute_norm_stats(subset: &LabeledDataset) -> NormStats {
    let (c, plane) = (subset.channels(), subset.height() * subset.width());
    let count = (subset.len() * plane) as f64;
    let mut mean = vec![0.0; c];
    let mut std = vec![0.0; c];
    for (ch, (m, s)) in mean.iter_mut().zip(std.iter_mut()).enumerate() {
        let pixels = || {
            (0..subset.len()).flat_map(move |i| subset.image(i)[ch * plane..(ch + 1) * plane].iter().map(|v| v / 255.0))
        };
        *m = pixels().sum::<f64>() / count;
        let var = pixels().map(|v| (v - *m) * (v - *m)).sum::<f64>() / count;
        *s = var.sqrt().max(STD_FLOOR);
    }
    NormStats { mean, std }
}

/// `x ← (x/255 − mean_c) / std_c`. Test data must be normalised with the
/// training subset's statistics.
pub fn normalize(data: &LabeledDataset, stats: &NormStats) -> Result<LabeledDataset> {
    let c = data.channels();
    if stats.mean.len() != c || stats.std.len() != c {
        return Err(Error::shape(
            "normalize",
            format!("stats for {c} channels"),
            format!("{} channels", stats.mean.len()),
        ));
    }
    let plane = data.height() * data.width();
    let mut images = data.images.clone();
    for (i, v) in images.data_mut().iter_mut().enumerate() {
        let ch = (i / plane) % c;
        *v = (*v / 255.0 - stats.mean[ch]) / stats.std[ch];
    }
    Ok(LabeledDataset { images, labels: data.labels.clone(), name: data.name.clone(), split: data.split })
}

/// Zero-pads 28×28 images by two pixels on every side. Apply to raw pixels,
/// before normalisation, so the border holds raw-zero values.
pub fn pad_to_32(data: &LabeledDataset) -> Result<LabeledDataset> {
    if data.height() != 28 || data.width() != 28 {
        return Err(Error::shape("pad_to_32", "28x28 images", format!("{:?}", data.images.shape())));
    }
    let (n, c) = (data.len(), data.channels());
    let mut out = vec![0.0; n * c * 32 * 32];
    for (src, dst) in data.images.data().chunks_exact(28).zip(0..) {
        // dst enumerates source rows across every image and channel
        let (plane, row) = (dst / 28, dst % 28);
        let start = plane * 1024 + (row + 2) * 32 + 2;
        out[start..start + 28].copy_from_slice(src);
    }
    let images = Tensor::new(vec![n, c, 32, 32], out)?;
    LabeledDataset::new(images, data.labels.clone(), data.name.clone(), data.split)
}
