use std::fs;
use std::path::Path;

use crate::datasets::{LabeledDataset, Split};
use crate::error::{Error, Result};
use crate::numerics::Tensor;

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize) -> Option<u32> {
    bytes.get(offset..offset + 4).map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

/// Parses the header and returns `(dims, payload)`, checking that the payload
/// length matches the header exactly.
fn read_idx(path: &Path, magic: u32, ndims: usize) -> Result<(Vec<usize>, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header_len = 4 + 4 * ndims;
    let truncated = |expected| Error::Truncated { path: path.to_path_buf(), expected, actual: bytes.len() };
    let found = read_u32(&bytes, 0).ok_or_else(|| truncated(header_len))?;
    if found != magic {
        return Err(Error::BadMagic { path: path.to_path_buf(), expected: magic, found });
    }
    let dims = (0..ndims)
        .map(|i| read_u32(&bytes, 4 + 4 * i).map(|d| d as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| truncated(header_len))?;
    let expected = header_len + dims.iter().product::<usize>();
    if bytes.len() != expected {
        return Err(truncated(expected));
    }
    let mut bytes = bytes;
    bytes.drain(..header_len);
    Ok((dims, bytes))
}

/// Loads an IDX image file (`[N, rows, cols]` unsigned bytes) and its label
/// file into a single-channel dataset with pixel values in `[0, 255]`.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let images_path = images_path.as_ref();
    let (dims, pixels) = read_idx(images_path, IDX_IMAGE_MAGIC, 3)?;
    let (label_dims, labels) = read_idx(labels_path.as_ref(), IDX_LABEL_MAGIC, 1)?;
    if dims[0] != label_dims[0] {
        return Err(Error::CountMismatch { images: dims[0], labels: label_dims[0] });
    }
    if let Some(index) = labels.iter().position(|&l| l >= 10) {
        return Err(Error::BadLabel { path: labels_path.as_ref().to_path_buf(), index, label: labels[index] });
    }
    let images = Tensor::new(vec![dims[0], 1, dims[1], dims[2]], pixels.into_iter().map(f64::from).collect())?;
    LabeledDataset::new(images, labels, name_of(images_path), split_of(images_path))
}

fn name_of(path: &Path) -> String {
    path.parent()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "idx".to_string())
}

fn split_of(path: &Path) -> Split {
    let file = path.file_name().map(|f| f.to_string_lossy().to_lowercase()).unwrap_or_default();
    if file.contains("t10k") || file.contains("test") {
        Split::Test
    } else {
        Split::Train
    }
}

/// Writes a single-channel dataset as an IDX image/label pair. Pixels are
/// rounded and clamped to `[0, 255]`.
pub fn write_idx(dataset: &LabeledDataset, images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<()> {
    if dataset.channels() != 1 {
        return Err(Error::invalid("write_idx", format!("IDX images are single-channel, got {}", dataset.channels())));
    }
    let (n, h, w) = (dataset.len(), dataset.height(), dataset.width());
    let mut img = Vec::with_capacity(16 + n * h * w);
    img.extend(IDX_IMAGE_MAGIC.to_be_bytes());
    for d in [n, h, w] {
        img.extend((d as u32).to_be_bytes());
    }
    img.extend(dataset.images.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));

    let mut lbl = Vec::with_capacity(8 + n);
    lbl.extend(IDX_LABEL_MAGIC.to_be_bytes());
    lbl.extend((n as u32).to_be_bytes());
    lbl.extend(&dataset.labels);

    let (ip, lp) = (images_path.as_ref(), labels_path.as_ref());
    fs::write(ip, img).map_err(|e| Error::io(ip, e))?;
    fs::write(lp, lbl).map_err(|e| Error::io(lp, e))
}
