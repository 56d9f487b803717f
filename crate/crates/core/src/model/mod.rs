//! The network: a 64-kernel 5×5 convolution (same padding) → max-pool 2/2 →
//! ReLU → max-pool 4/4 → flatten (1024) → dense 64 → ReLU → dense 10.
//!
//! With 32×32 inputs the conv path ends at 64 × 4 × 4 = 1024 features, which
//! is the width of the fully connected head. The second 4/4 pool is what
//! reconciles the single stated pooling layer with that width.

mod eval;
mod network;
mod train;

pub use eval::{argmax, evaluate, predict};
pub use network::{build_model, glorot_bound, Architecture, FcInit, Gradients, HiddenActivation, Model, POOL1, POOL2};
pub use train::{train, Arm, EpochStats, History, TrainConfig};
