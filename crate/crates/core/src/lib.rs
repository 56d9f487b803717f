//! Random-feature convolutional networks whose frozen synaptic strengths are
//! drawn from biologically inspired distributions.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense `f64` tensors, the seedable [`numerics::Rng`], and the
//!   forward/backward primitives (5×5 convolution, max-pooling, ReLU, dense
//!   layers, softmax cross-entropy) plus a Cholesky factorisation.
//! - [`synapse_gen`]: the three generative models for convolutional kernels
//!   (standard normal, log-normal, correlated centre-surround) and kernel-bank
//!   diagnostics.
//! - [`datasets`]: IDX and CIFAR-10 binary loaders, stratified small-data
//!   subsampling and per-channel standardisation.
//! - [`model`]: the conv → pool → ReLU → pool → 1024-64-10 network, the SGD
//!   training loop, and evaluation.
//! - [`experiment`]: the seeded multi-run grid and its aggregation.
//! - [`config`] and [`cli`]: the flat `key = value` configuration format and the
//!   `sample | run | experiment` front end behind the `synaptogen` binary.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod cli;
pub mod config;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod model;
pub mod numerics;
pub mod synapse_gen;

pub use error::{Error, Result};
pub use numerics::{Rng, Tensor};
