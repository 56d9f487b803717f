//! Generative models for convolutional synaptic strengths.
//!
//! Three variants are provided, each producing a full `[K, C, 5, 5]` kernel
//! bank that stays frozen during training:
//!
//! - **Normal**: i.i.d. `N(0, 1)`.
//! - **LogNormal**: i.i.d. `exp(μ + σ·z)`, strictly positive. Defaults
//!   `μ = −0.702`, `σ² = 0.9355`.
//! - **CenterSurround**: each 5×5 slice is one draw from a zero-mean
//!   25-dimensional Gaussian whose covariance is a stationary
//!   difference-of-Gaussians ("Mexican hat") over the receptive-field grid,
//!   so neighbouring synapses are positively correlated and distant ones
//!   weakly anti-correlated.

mod bank;
mod covariance;
mod distribution;
mod export;
mod sampling;

pub use bank::{generate_kernel_bank, kernel_stats, KernelBank, KernelOrigin, KernelStats};
pub use covariance::{build_center_surround_cov, center_surround_kernel_matrix, dog_covariance};
pub use distribution::{CenterSurroundParams, SynapseDistribution, LOGNORMAL_MU, LOGNORMAL_SIGMA2};
pub use export::{export_kernels_pgm, read_pgm, write_stats_csv, Pgm};
pub use sampling::{sample_center_surround, sample_lognormal, sample_normal};

/// Side length of a receptive field.
pub const FIELD_SIZE: usize = crate::numerics::KERNEL_SIZE;
