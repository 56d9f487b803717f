use crate::error::{Error, Result};

/// Symmetric `dim × dim` matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// Rejects non-square data and any entry pair with `Σ_jk != Σ_kj`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::shape(
                "covariance",
                format!("{} entries for a {dim}x{dim} matrix", dim * dim),
                format!("{} entries", entries.len()),
            ));
        }
        for j in 0..dim {
            for k in j + 1..dim {
                if entries[j * dim + k] != entries[k * dim + j] {
                    return Err(Error::invalid("covariance", format!("entries ({j}, {k}) and ({k}, {j}) differ")));
                }
            }
        }
        Ok(CovarianceMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        CovarianceMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }
}

/// Lower-triangular factor `L` with `L·Lᵀ = Σ`, stored as a dense row-major
/// square (entries above the diagonal are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    entries: Vec<f64>,
}

impl LowerTriangular {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// `L·u`, writing into `out`.
    pub fn mul_vec_into(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..i * self.dim + i + 1];
            *o = row.iter().zip(u).map(|(l, x)| l * x).sum();
        }
    }

    /// `L·Lᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = (0..=j).map(|m| self.get(i, m) * self.get(j, m)).sum();
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }
}

/// Cholesky–Banachiewicz factorisation. Any diagonal jitter must already be
/// part of `cov`; a pivot that is not strictly positive is rejected with its
/// index.
pub fn cholesky(cov: &CovarianceMatrix) -> Result<LowerTriangular> {
    let n = cov.dim;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|m| l[i * n + m] * l[j * n + m]).sum();
            let residual = cov.get(i, j) - dot;
            if i == j {
                if residual <= 0.0 || !residual.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: residual });
                }
                l[i * n + i] = residual.sqrt();
            } else {
                l[i * n + j] = residual / l[j * n + j];
            }
        }
    }
    Ok(LowerTriangular { dim: n, entries: l })
}

/// `‖a − b‖_F / ‖b‖_F` over two equally sized row-major matrices.
pub fn frobenius_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = b.iter().map(|y| y * y).sum();
    (diff / norm).sqrt()
}
