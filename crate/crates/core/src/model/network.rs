use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Arm, TrainConfig};
use crate::numerics::{
    conv2d_backward_params, conv2d_forward, dense_backward, dense_forward, maxpool_backward, maxpool_forward, relu,
    relu_backward, softmax_cross_entropy, PoolIndices, Rng, Tensor, KERNEL_SIZE,
};
use crate::synapse_gen::{generate_kernel_bank, KernelBank, KernelOrigin, SynapseDistribution};

/// `(size, stride)` of the pool directly after the convolution.
pub const POOL1: (usize, usize) = (2, 2);
/// `(size, stride)` of the pool that brings the map down to 4×4.
pub const POOL2: (usize, usize) = (4, 4);

/// Layer widths. The defaults are the 64-kernel, 1024-64-10 network on
/// 32×32 inputs; smaller settings exist for tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub num_kernels: usize,
    pub input_size: usize,
    pub hidden_units: usize,
    pub num_classes: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture { num_kernels: 64, input_size: 32, hidden_units: 64, num_classes: 10 }
    }
}

impl Architecture {
    /// Side of the feature map after both pools.
    pub fn pooled_size(&self) -> usize {
        self.input_size / (POOL1.1 * POOL2.1)
    }

    pub fn feature_len(&self) -> usize {
        self.num_kernels * self.pooled_size() * self.pooled_size()
    }

    fn validate(&self) -> Result<()> {
        let step = POOL1.1 * POOL2.1;
        if self.input_size == 0 || !self.input_size.is_multiple_of(step) {
            return Err(Error::invalid("architecture", format!("input size must be a positive multiple of {step}")));
        }
        if self.num_kernels == 0 || self.hidden_units == 0 || self.num_classes < 2 {
            return Err(Error::invalid("architecture", "layer widths must be positive and classes at least 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    #[default]
    Relu,
    Identity,
}

/// Initialisation of the fully connected layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FcInit {
    #[default]
    Glorot,
    /// Draw from the arm's synapse distribution (its marginal, for the
    /// correlated model). Falls back to Glorot for the trained baseline.
    SameAsConv,
}

/// `√(6 / (fan_in + fan_out))`.
pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn glorot(rng: &mut Rng, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let bound = glorot_bound(fan_in, fan_out);
    let data = (0..shape.iter().product::<usize>()).map(|_| rng.uniform_range(-bound, bound)).collect();
    Tensor::new(shape.to_vec(), data).expect("shape")
}

fn from_distribution(rng: &mut Rng, shape: &[usize], dist: &SynapseDistribution) -> Tensor {
    let n: usize = shape.iter().product();
    let data = match *dist {
        SynapseDistribution::Normal => (0..n).map(|_| rng.standard_normal()).collect(),
        SynapseDistribution::LogNormal { mu, sigma2, sign_flip } => (0..n)
            .map(|_| {
                let w = (mu + sigma2.sqrt() * rng.standard_normal()).exp();
                if sign_flip {
                    w * rng.rademacher()
                } else {
                    w
                }
            })
            .collect(),
        SynapseDistribution::CenterSurround(p) => {
            let sd = p.marginal_variance().sqrt();
            (0..n).map(|_| sd * rng.standard_normal()).collect()
        }
    };
    Tensor::new(shape.to_vec(), data).expect("shape")
}

#[derive(Clone, Debug)]
pub struct Model {
    pub conv: KernelBank,
    pub fc1_weights: Tensor,
    pub fc1_bias: Tensor,
    pub fc2_weights: Tensor,
    pub fc2_bias: Tensor,
    pub hidden: HiddenActivation,
    pub architecture: Architecture,
}

/// Builds the conv bank for `config.arm` and initialises the head.
///
/// Sampled arms take a frozen bank from the arm's distribution (optionally
/// rescaled so each kernel has unit expected fan-in energy); the trained
/// baseline gets a Glorot-uniform bank with `frozen = false`. Every bias
/// starts at zero.
pub fn build_model(config: &TrainConfig, channels: usize, rng: &mut Rng) -> Result<Model> {
    let arch = config.architecture;
    arch.validate()?;
    if !(1..=3).contains(&channels) {
        return Err(Error::invalid("build_model", format!("expected 1 or 3 input channels, got {channels}")));
    }
    let bank_seed = rng.next_u64();
    let fan_in = channels * KERNEL_SIZE * KERNEL_SIZE;
    let conv = match &config.arm {
        Arm::Sampled(dist) => {
            let mut bank = generate_kernel_bank(dist, arch.num_kernels, channels, bank_seed)?;
            if config.scale_to_unit_fanin {
                let scale = 1.0 / (fan_in as f64 * dist.second_moment()).sqrt();
                bank.weights.data_mut().iter_mut().for_each(|w| *w *= scale);
            }
            bank.frozen = config.freeze_conv;
            bank
        }
        Arm::FullyTrained => {
            let fan_out = arch.num_kernels * KERNEL_SIZE * KERNEL_SIZE;
            let shape = [arch.num_kernels, channels, KERNEL_SIZE, KERNEL_SIZE];
            KernelBank {
                weights: glorot(&mut Rng::seed_from_u64(bank_seed), &shape, fan_in, fan_out),
                origin: KernelOrigin::GlorotUniform,
                seed: bank_seed,
                frozen: false,
            }
        }
    };

    let mut fc_rng = rng.child();
    let (f, h, k) = (arch.feature_len(), arch.hidden_units, arch.num_classes);
    let (fc1_weights, fc2_weights) = match (&config.fc_init, &config.arm) {
        (FcInit::SameAsConv, Arm::Sampled(dist)) => {
            (from_distribution(&mut fc_rng, &[h, f], dist), from_distribution(&mut fc_rng, &[k, h], dist))
        }
        _ => (glorot(&mut fc_rng, &[h, f], f, h), glorot(&mut fc_rng, &[k, h], h, k)),
    };

    Ok(Model {
        conv,
        fc1_weights,
        fc1_bias: Tensor::zeros(&[h]),
        fc2_weights,
        fc2_bias: Tensor::zeros(&[k]),
        hidden: config.hidden_activation,
        architecture: arch,
    })
}

/// Intermediate values of the conv path needed by the backward pass.
struct ConvCache {
    pooled: Tensor,
    pool1: PoolIndices,
    pool2: PoolIndices,
}

/// Per-parameter gradients (or momentum buffers) with the model's shapes.
#[derive(Clone, Debug)]
pub struct Gradients {
    /// Present only when the conv bank is trainable.
    pub conv: Option<Tensor>,
    pub fc1_weights: Tensor,
    pub fc1_bias: Tensor,
    pub fc2_weights: Tensor,
    pub fc2_bias: Tensor,
}

impl Gradients {
    pub fn zeros_like(model: &Model) -> Self {
        Gradients {
            conv: (!model.conv.frozen).then(|| Tensor::zeros(model.conv.weights.shape())),
            fc1_weights: Tensor::zeros(model.fc1_weights.shape()),
            fc1_bias: Tensor::zeros(model.fc1_bias.shape()),
            fc2_weights: Tensor::zeros(model.fc2_weights.shape()),
            fc2_bias: Tensor::zeros(model.fc2_bias.shape()),
        }
    }

    fn parts(&self) -> impl Iterator<Item = &Tensor> {
        self.conv.iter().chain([&self.fc1_weights, &self.fc1_bias, &self.fc2_weights, &self.fc2_bias])
    }

    fn parts_mut(&mut self) -> impl Iterator<Item = &mut Tensor> {
        self.conv.iter_mut().chain([
            &mut self.fc1_weights,
            &mut self.fc1_bias,
            &mut self.fc2_weights,
            &mut self.fc2_bias,
        ])
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.parts_mut().zip(other.parts()) {
            a.data_mut().iter_mut().zip(b.data()).for_each(|(x, y)| *x += y);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.parts_mut() {
            t.data_mut().iter_mut().for_each(|x| *x *= factor);
        }
    }
}

impl Model {
    fn check_input(&self, image: &Tensor) -> Result<()> {
        let s = self.architecture.input_size;
        let expected = [self.conv.channels(), s, s];
        if image.shape() != expected {
            return Err(Error::shape(
                "model_forward",
                format!("image {expected:?}"),
                format!("image {:?}", image.shape()),
            ));
        }
        Ok(())
    }

    fn conv_path(&self, image: &Tensor) -> Result<(Tensor, ConvCache)> {
        self.check_input(image)?;
        let conv = conv2d_forward(image, &self.conv.weights, &self.conv.biases(), KERNEL_SIZE / 2)?;
        let (pooled, pool1) = maxpool_forward(&conv, POOL1.0, POOL1.1)?;
        let (features, pool2) = maxpool_forward(&relu(&pooled), POOL2.0, POOL2.1)?;
        let len = features.len();
        Ok((features.reshape(vec![len])?, ConvCache { pooled, pool1, pool2 }))
    }

    /// Flattened conv-path output (length [`Architecture::feature_len`]).
    pub fn features(&self, image: &Tensor) -> Result<Tensor> {
        Ok(self.conv_path(image)?.0)
    }

    fn activate(&self, pre: &Tensor) -> Tensor {
        match self.hidden {
            HiddenActivation::Relu => relu(pre),
            HiddenActivation::Identity => pre.clone(),
        }
    }

    /// Logits of the head applied to precomputed features.
    pub fn head_forward(&self, features: &Tensor) -> Result<Tensor> {
        let pre = dense_forward(features, &self.fc1_weights, &self.fc1_bias)?;
        dense_forward(&self.activate(&pre), &self.fc2_weights, &self.fc2_bias)
    }

    /// Raw logits for one normalised `[C, S, S]` image.
    pub fn forward(&self, image: &Tensor) -> Result<Tensor> {
        self.head_forward(&self.features(image)?)
    }

    /// Cross-entropy loss, logits, head gradients and the gradient with
    /// respect to the features.
    fn head_backward(&self, features: &Tensor, label: usize) -> Result<(f64, Tensor, Gradients, Tensor)> {
        let pre = dense_forward(features, &self.fc1_weights, &self.fc1_bias)?;
        let hidden = self.activate(&pre);
        let logits = dense_forward(&hidden, &self.fc2_weights, &self.fc2_bias)?;
        let (loss, grad_logits) = softmax_cross_entropy(&logits, label)?;
        let g2 = dense_backward(&hidden, &self.fc2_weights, &grad_logits)?;
        let grad_pre = match self.hidden {
            HiddenActivation::Relu => relu_backward(&pre, &g2.input)?,
            HiddenActivation::Identity => g2.input,
        };
        let g1 = dense_backward(features, &self.fc1_weights, &grad_pre)?;
        let grads = Gradients {
            conv: None,
            fc1_weights: g1.weights,
            fc1_bias: g1.bias,
            fc2_weights: g2.weights,
            fc2_bias: g2.bias,
        };
        Ok((loss, logits, grads, g1.input))
    }

    /// Loss and gradients for the head only, from cached features.
    pub fn head_loss_and_grads(&self, features: &Tensor, label: usize) -> Result<(f64, Tensor, Gradients)> {
        let (loss, logits, grads, _) = self.head_backward(features, label)?;
        Ok((loss, logits, grads))
    }

    /// Loss, logits and gradients for every trainable parameter; the conv
    /// gradient is included iff the bank is not frozen.
    pub fn loss_and_grads(&self, image: &Tensor, label: usize) -> Result<(f64, Tensor, Gradients)> {
        let (features, cache) = self.conv_path(image)?;
        let (loss, logits, mut grads, grad_features) = self.head_backward(&features, label)?;
        if !self.conv.frozen {
            let g_pool2 = grad_features.reshape(vec![
                self.architecture.num_kernels,
                self.architecture.pooled_size(),
                self.architecture.pooled_size(),
            ])?;
            let g_relu = maxpool_backward(&cache.pool2, &g_pool2)?;
            let g_pool1 = relu_backward(&cache.pooled, &g_relu)?;
            let g_conv = maxpool_backward(&cache.pool1, &g_pool1)?;
            grads.conv = Some(conv2d_backward_params(image, &self.conv.weights, &g_conv)?.kernels);
        }
        Ok((loss, logits, grads))
    }

    /// Momentum SGD: `v ← momentum·v − lr·g`, `θ ← θ + v`.
    pub fn apply_momentum_step(&mut self, velocity: &mut Gradients, grads: &Gradients, lr: f64, momentum: f64) {
        let mut params: Vec<&mut Tensor> = Vec::with_capacity(5);
        if self.conv.frozen {
            assert!(grads.conv.is_none() && velocity.conv.is_none(), "frozen bank received a gradient");
        } else {
            params.push(&mut self.conv.weights);
        }
        params.extend([&mut self.fc1_weights, &mut self.fc1_bias, &mut self.fc2_weights, &mut self.fc2_bias]);
        for ((p, v), g) in params.into_iter().zip(velocity.parts_mut()).zip(grads.parts()) {
            for ((p, v), g) in p.data_mut().iter_mut().zip(v.data_mut()).zip(g.data()) {
                *v = momentum * *v - lr * g;
                *p += *v;
            }
        }
    }

    /// Every trainable parameter in the order of [`Gradients`].
    pub fn trainable(&self) -> Vec<&Tensor> {
        let mut out = Vec::with_capacity(5);
        if !self.conv.frozen {
            out.push(&self.conv.weights);
        }
        out.extend([&self.fc1_weights, &self.fc1_bias, &self.fc2_weights, &self.fc2_bias]);
        out
    }

    pub fn trainable_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::with_capacity(5);
        if !self.conv.frozen {
            out.push(&mut self.conv.weights);
        }
        out.extend([&mut self.fc1_weights, &mut self.fc1_bias, &mut self.fc2_weights, &mut self.fc2_bias]);
        out
    }

    /// Bitwise equality of every parameter.
    pub fn bitwise_eq(&self, other: &Model) -> bool {
        self.conv.weights.bitwise_eq(&other.conv.weights)
            && self.fc1_weights.bitwise_eq(&other.fc1_weights)
            && self.fc1_bias.bitwise_eq(&other.fc1_bias)
            && self.fc2_weights.bitwise_eq(&other.fc2_weights)
            && self.fc2_bias.bitwise_eq(&other.fc2_bias)
    }
}

impl Gradients {
    /// Gradient tensors in the order of [`Model::trainable`].
    pub fn tensors(&self) -> Vec<&Tensor> {
        self.parts().collect()
    }
}
