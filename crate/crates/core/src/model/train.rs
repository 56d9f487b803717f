use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::model::{argmax, Architecture, FcInit, Gradients, HiddenActivation, Model};
use crate::numerics::{derive_seed, hash_label, Rng, Tensor};
use crate::synapse_gen::SynapseDistribution;

/// One column of the comparison grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    /// Conv bank sampled from a distribution and (by default) frozen.
    Sampled(SynapseDistribution),
    /// Glorot-initialised conv bank trained together with the head.
    FullyTrained,
}

impl Arm {
    /// Command-line name: `normal`, `lognormal`, `center-surround` or
    /// `fully-trained`.
    pub fn name(&self) -> &'static str {
        match self {
            Arm::Sampled(d) => d.name(),
            Arm::FullyTrained => "fully-trained",
        }
    }

    /// Column heading used in result tables.
    pub fn title(&self) -> &'static str {
        match self {
            Arm::Sampled(SynapseDistribution::Normal) => "Normal",
            Arm::Sampled(SynapseDistribution::LogNormal { .. }) => "Log-Normal",
            Arm::Sampled(SynapseDistribution::CenterSurround(_)) => "Center-Surround",
            Arm::FullyTrained => "Fully Trained",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Ignored by [`Arm::FullyTrained`], whose bank always trains.
    pub freeze_conv: bool,
    pub fc_init: FcInit,
    pub arm: Arm,
    pub hidden_activation: HiddenActivation,
    pub scale_to_unit_fanin: bool,
    pub architecture: Architecture,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            epochs: 60,
            seed: 0,
            freeze_conv: true,
            fc_init: FcInit::Glorot,
            arm: Arm::Sampled(SynapseDistribution::Normal),
            hidden_activation: HiddenActivation::Relu,
            scale_to_unit_fanin: false,
            architecture: Architecture::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::invalid("train_config", why.to_string()));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be a finite non-negative number");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must lie in [0, 1)");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// Mean per-example loss over the epoch.
    pub loss: f64,
    /// Fraction of examples classified correctly as they were visited.
    pub train_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochStats>,
}

impl History {
    pub fn final_train_accuracy(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.train_accuracy)
    }

    /// Mean loss over the first `n` epochs.
    pub fn head_loss(&self, n: usize) -> f64 {
        let n = n.min(self.epochs.len()).max(1);
        self.epochs[..n].iter().map(|e| e.loss).sum::<f64>() / n as f64
    }

    /// Mean loss over the last `n` epochs.
    pub fn tail_loss(&self, n: usize) -> f64 {
        let n = n.min(self.epochs.len()).max(1);
        self.epochs[self.epochs.len() - n..].iter().map(|e| e.loss).sum::<f64>() / n as f64
    }
}

/// Mini-batch SGD with momentum on the mean cross-entropy of each batch.
///
/// Examples are reshuffled every epoch from a generator derived from
/// `config.seed`. A frozen conv bank is never touched: its features are
/// computed once up front and only the head is updated. Training aborts on
/// a non-finite batch loss.
///
/// With `learning_rate = 0` the returned model is a bitwise copy of `model`.
pub fn train(model: &Model, trainset: &LabeledDataset, config: &TrainConfig) -> Result<(Model, History)> {
    config.validate()?;
    if trainset.is_empty() {
        return Err(Error::invalid("train", "training set is empty"));
    }
    let mut model = model.clone();
    let images: Vec<Tensor> = (0..trainset.len()).map(|i| trainset.image_tensor(i)).collect();
    let features: Option<Vec<Tensor>> = if model.conv.frozen {
        Some(images.iter().map(|img| model.features(img)).collect::<Result<_>>()?)
    } else {
        None
    };

    let mut rng = Rng::seed_from_u64(derive_seed(config.seed, &[hash_label("epoch-shuffle")]));
    let mut order: Vec<usize> = (0..trainset.len()).collect();
    let mut velocity = Gradients::zeros_like(&model);
    let mut history = History::default();

    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let (mut epoch_loss, mut correct) = (0.0, 0usize);
        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            let mut grads = Gradients::zeros_like(&model);
            let mut batch_loss = 0.0;
            for &i in chunk {
                let label = trainset.labels[i] as usize;
                let (loss, logits, g) = match &features {
                    Some(f) => model.head_loss_and_grads(&f[i], label)?,
                    None => model.loss_and_grads(&images[i], label)?,
                };
                batch_loss += loss;
                correct += usize::from(argmax(logits.data()) == label);
                grads.add_assign(&g);
            }
            if !batch_loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch });
            }
            epoch_loss += batch_loss;
            grads.scale(1.0 / chunk.len() as f64);
            model.apply_momentum_step(&mut velocity, &grads, config.learning_rate, config.momentum);
        }
        let n = trainset.len() as f64;
        log::debug!("epoch {epoch}: loss {:.4}, train accuracy {:.4}", epoch_loss / n, correct as f64 / n);
        history.epochs.push(EpochStats { loss: epoch_loss / n, train_accuracy: correct as f64 / n });
    }
    Ok((model, history))
}
