use crate::error::{Error, Result};
use crate::numerics::{cholesky, CovarianceMatrix, LowerTriangular, Rng, Tensor};
use crate::synapse_gen::FIELD_SIZE;

/// `n` i.i.d. standard-normal draws.
pub fn sample_normal(rng: &mut Rng, n: usize) -> Tensor {
    Tensor::from_vec((0..n).map(|_| rng.standard_normal()).collect())
}

/// `n` draws of `exp(mu + sigma·z)` with `z ~ N(0, 1)` and `sigma = √sigma2`.
pub fn sample_lognormal(rng: &mut Rng, n: usize, mu: f64, sigma2: f64) -> Result<Tensor> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::InvalidDistribution(format!("sigma2 must be positive, got {sigma2}")));
    }
    let sigma = sigma2.sqrt();
    Ok(Tensor::from_vec((0..n).map(|_| (mu + sigma * rng.standard_normal()).exp()).collect()))
}

pub(crate) fn draw_correlated(rng: &mut Rng, factor: &LowerTriangular, out: &mut [f64]) {
    let u: Vec<f64> = (0..factor.dim()).map(|_| rng.standard_normal()).collect();
    factor.mul_vec_into(&u, out);
}

/// `[num_kernels, channels, 5, 5]` weights where each 5×5 slice is an
/// independent draw `L·u`, `u ~ N(0, I)`, `L·Lᵀ = cov`, laid out row-major on
/// the grid.
pub fn sample_center_surround(
    rng: &mut Rng,
    num_kernels: usize,
    channels: usize,
    cov: &CovarianceMatrix,
) -> Result<Tensor> {
    let field = FIELD_SIZE * FIELD_SIZE;
    if cov.dim() != field {
        return Err(Error::shape(
            "sample_center_surround",
            format!("{field}x{field} covariance"),
            format!("{0}x{0}", cov.dim()),
        ));
    }
    let factor = cholesky(cov)?;
    let mut data = vec![0.0; num_kernels * channels * field];
    for slice in data.chunks_exact_mut(field) {
        draw_correlated(rng, &factor, slice);
    }
    Tensor::new(vec![num_kernels, channels, FIELD_SIZE, FIELD_SIZE], data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_is_deterministic_per_seed() {
        let a = sample_normal(&mut Rng::seed_from_u64(3), 10);
        let b = sample_normal(&mut Rng::seed_from_u64(3), 10);
        assert!(a.bitwise_eq(&b));
    }

    #[test]
    fn lognormal_is_positive() {
        let w = sample_lognormal(&mut Rng::seed_from_u64(5), 10_000, -0.702, 0.9355).unwrap();
        assert!(w.data().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn identity_covariance_matches_normal_stream() {
        // L = I, so the slice is exactly the next 25 normal draws.
        let cs = sample_center_surround(&mut Rng::seed_from_u64(9), 2, 1, &CovarianceMatrix::identity(25)).unwrap();
        let n = sample_normal(&mut Rng::seed_from_u64(9), 50);
        assert_eq!(cs.data(), n.data());
    }

    #[test]
    fn wrong_covariance_size_rejected() {
        assert!(sample_center_surround(&mut Rng::seed_from_u64(0), 1, 1, &CovarianceMatrix::identity(9)).is_err());
    }
}
