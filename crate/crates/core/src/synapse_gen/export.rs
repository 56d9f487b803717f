use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::synapse_gen::{KernelBank, KernelStats, FIELD_SIZE};

/// 8-bit greyscale image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

fn rescale(slice: &[f64]) -> Vec<u8> {
    let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
    let max = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![128; slice.len()];
    }
    slice.iter().map(|v| ((v - min) / (max - min) * 255.0).round() as u8).collect()
}

/// Writes one binary P5 file per `(kernel, channel)` slice, each affinely
/// rescaled so its minimum maps to 0 and its maximum to 255. Constant slices
/// become uniform 128.
///
/// Files are named `kernel_{k:02}_c{c}.pgm`; the paths are returned in bank
/// order.
pub fn export_kernels_pgm(bank: &KernelBank, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let field = FIELD_SIZE * FIELD_SIZE;
    let channels = bank.channels();
    let mut paths = Vec::with_capacity(bank.weights.len() / field);
    for (idx, slice) in bank.weights.data().chunks_exact(field).enumerate() {
        let path = dir.join(format!("kernel_{:02}_c{}.pgm", idx / channels, idx % channels));
        let mut bytes = format!("P5\n{FIELD_SIZE} {FIELD_SIZE}\n255\n").into_bytes();
        bytes.extend(rescale(slice));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads a binary P5 file with a maximum value of 255. Comment lines are not
/// supported.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<Pgm> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |why: &str| Error::invalid("read_pgm", format!("{}: {why}", path.display()));
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(bad("not a binary PGM"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("malformed header"));
    let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(bad("only 8-bit images are supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    let pixels = bytes.get(pos + 1..).unwrap_or_default().to_vec();
    if pixels.len() != width * height {
        return Err(bad("raster size does not match header"));
    }
    Ok(Pgm { width, height, pixels })
}

/// CSV with header `bank_id,mean,var,min,max`, one row per bank.
pub fn write_stats_csv(rows: &[(String, KernelStats)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| Error::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(["bank_id", "mean", "var", "min", "max"]).map_err(to_err)?;
    for (id, s) in rows {
        w.write_record([id.clone(), s.mean.to_string(), s.variance.to_string(), s.min.to_string(), s.max.to_string()])
            .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
