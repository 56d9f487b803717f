use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cholesky, derive_seed, Rng, Tensor};
use crate::synapse_gen::sampling::draw_correlated;
use crate::synapse_gen::{build_center_surround_cov, SynapseDistribution, FIELD_SIZE};

/// How a bank's weights were initialised.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelOrigin {
    Sampled(SynapseDistribution),
    /// Glorot-uniform initialisation of the trainable baseline.
    GlorotUniform,
}

/// Convolutional weights `[K, C, 5, 5]`. Biases are always zero and never
/// trained, so they are not stored.
#[derive(Clone, Debug)]
pub struct KernelBank {
    pub weights: Tensor,
    pub origin: KernelOrigin,
    pub seed: u64,
    pub frozen: bool,
}

impl KernelBank {
    pub fn num_kernels(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn channels(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn biases(&self) -> Tensor {
        Tensor::zeros(&[self.num_kernels()])
    }
}

/// Samples a frozen bank of `num_kernels × channels` slices from `dist`.
///
/// Slice `(k, c)` is drawn from its own generator seeded with
/// `derive_seed(seed, [k, c])`, so the bank is a pure function of
/// `(dist, num_kernels, channels, seed)`.
pub fn generate_kernel_bank(
    dist: &SynapseDistribution,
    num_kernels: usize,
    channels: usize,
    seed: u64,
) -> Result<KernelBank> {
    dist.validate()?;
    if num_kernels == 0 || channels == 0 {
        return Err(Error::invalid("generate_kernel_bank", "kernel and channel counts must be positive"));
    }
    let field = FIELD_SIZE * FIELD_SIZE;
    let factor = match dist {
        SynapseDistribution::CenterSurround(p) => Some(cholesky(&build_center_surround_cov(FIELD_SIZE, p)?)?),
        _ => None,
    };
    let mut data = vec![0.0; num_kernels * channels * field];
    for (slice_idx, slice) in data.chunks_exact_mut(field).enumerate() {
        let (k, c) = (slice_idx / channels, slice_idx % channels);
        let mut rng = Rng::seed_from_u64(derive_seed(seed, &[k as u64, c as u64]));
        match *dist {
            SynapseDistribution::Normal => slice.iter_mut().for_each(|w| *w = rng.standard_normal()),
            SynapseDistribution::LogNormal { mu, sigma2, sign_flip } => {
                let sigma = sigma2.sqrt();
                for w in slice.iter_mut() {
                    *w = (mu + sigma * rng.standard_normal()).exp();
                }
                if sign_flip {
                    slice.iter_mut().for_each(|w| *w *= rng.rademacher());
                }
            }
            SynapseDistribution::CenterSurround(_) => {
                draw_correlated(&mut rng, factor.as_ref().expect("factor computed above"), slice)
            }
        }
    }
    Ok(KernelBank {
        weights: Tensor::new(vec![num_kernels, channels, FIELD_SIZE, FIELD_SIZE], data)?,
        origin: KernelOrigin::Sampled(*dist),
        seed,
        frozen: true,
    })
}

/// Exact sample statistics of a bank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelStats {
    pub count: usize,
    pub mean: f64,
    /// Population variance over every weight.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Population 25×25 covariance across the bank's 5×5 slices, row-major.
    pub covariance: Vec<f64>,
}

pub fn kernel_stats(bank: &KernelBank) -> KernelStats {
    let w = bank.weights.data();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let variance = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let field = FIELD_SIZE * FIELD_SIZE;
    let slices = w.len() / field;
    let mut coord_mean = vec![0.0; field];
    for slice in w.chunks_exact(field) {
        coord_mean.iter_mut().zip(slice).for_each(|(m, v)| *m += v);
    }
    coord_mean.iter_mut().for_each(|m| *m /= slices as f64);
    let mut covariance = vec![0.0; field * field];
    for slice in w.chunks_exact(field) {
        for a in 0..field {
            let da = slice[a] - coord_mean[a];
            for b in 0..field {
                covariance[a * field + b] += da * (slice[b] - coord_mean[b]);
            }
        }
    }
    covariance.iter_mut().for_each(|c| *c /= slices as f64);

    KernelStats { count: w.len(), mean, variance, min, max, covariance }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mnist_shaped_bank() {
        let bank = generate_kernel_bank(&SynapseDistribution::Normal, 64, 1, 11).unwrap();
        assert_eq!(bank.weights.shape(), &[64, 1, 5, 5]);
        assert_eq!(bank.weights.len(), 1600);
        assert!(bank.frozen);
        assert!(bank.biases().data().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn same_seed_same_bank() {
        for dist in
            [SynapseDistribution::Normal, SynapseDistribution::lognormal(), SynapseDistribution::center_surround()]
        {
            let a = generate_kernel_bank(&dist, 64, 3, 99).unwrap();
            let b = generate_kernel_bank(&dist, 64, 3, 99).unwrap();
            assert!(a.weights.bitwise_eq(&b.weights), "{}", dist.name());
            let c = generate_kernel_bank(&dist, 64, 3, 100).unwrap();
            assert!(!a.weights.bitwise_eq(&c.weights));
        }
    }

    #[test]
    fn lognormal_bank_positive_unless_flipped() {
        let bank = generate_kernel_bank(&SynapseDistribution::lognormal(), 64, 3, 1).unwrap();
        assert!(kernel_stats(&bank).min > 0.0);

        let flipped = SynapseDistribution::LogNormal { mu: -0.702, sigma2: 0.9355, sign_flip: true };
        let bank = generate_kernel_bank(&flipped, 64, 3, 1).unwrap();
        assert!(kernel_stats(&bank).min < 0.0);
    }

    #[test]
    fn zero_bank_stats() {
        let bank = KernelBank {
            weights: Tensor::zeros(&[4, 1, 5, 5]),
            origin: KernelOrigin::GlorotUniform,
            seed: 0,
            frozen: true,
        };
        let s = kernel_stats(&bank);
        assert_eq!((s.mean, s.variance, s.min, s.max), (0.0, 0.0, 0.0, 0.0));
        assert!(s.covariance.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn normal_bank_mean_is_small() {
        let bank = generate_kernel_bank(&SynapseDistribution::Normal, 64, 1, 2024).unwrap();
        assert!(kernel_stats(&bank).mean.abs() <= 0.08);
    }
}
