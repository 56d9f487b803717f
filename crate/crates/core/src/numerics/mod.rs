//! Dense tensors, the seedable random source, and the neural-network
//! primitives everything else is built from.
//!
//! All operations take their inputs by reference and return fresh tensors;
//! nothing here mutates an argument.

mod activation;
mod conv;
mod dense;
mod linalg;
mod loss;
mod pool;
mod rng;
mod tensor;

pub use activation::{relu, relu_backward};
pub use conv::{conv2d_backward, conv2d_backward_params, conv2d_forward, ConvGrads, KERNEL_SIZE};
pub use dense::{dense_backward, dense_forward, DenseGrads};
pub use linalg::{cholesky, frobenius_relative_error, CovarianceMatrix, LowerTriangular};
pub use loss::softmax_cross_entropy;
pub use pool::{maxpool_backward, maxpool_forward, PoolIndices};
pub use rng::{derive_seed, hash_label, Rng};
pub use tensor::Tensor;
