//! Compares backpropagated gradients of a tiny fully trainable network with
//! central finite differences.

use synaptogen::datasets::{LabeledDataset, Split};
use synaptogen::model::{build_model, Architecture, Arm, Gradients, Model, TrainConfig};
use synaptogen::{Rng, Tensor};

const STEP: f64 = 1e-5;

fn total_loss(model: &Model, data: &LabeledDataset) -> f64 {
    (0..data.len()).map(|i| model.loss_and_grads(&data.image_tensor(i), data.labels[i] as usize).unwrap().0).sum()
}

fn main() -> synaptogen::Result<()> {
    let mut rng = Rng::seed_from_u64(1);
    let pixels = (0..8 * 16 * 16).map(|_| rng.standard_normal()).collect();
    let data = LabeledDataset::new(
        Tensor::new(vec![8, 1, 16, 16], pixels)?,
        vec![0, 1, 0, 1, 0, 1, 0, 1],
        "toy",
        Split::Train,
    )?;
    let config = TrainConfig {
        arm: Arm::FullyTrained,
        architecture: Architecture { num_kernels: 4, input_size: 16, hidden_units: 8, num_classes: 2 },
        ..TrainConfig::default()
    };
    let model = build_model(&config, 1, &mut rng)?;

    let mut grads = Gradients::zeros_like(&model);
    for i in 0..data.len() {
        grads.add_assign(&model.loss_and_grads(&data.image_tensor(i), data.labels[i] as usize)?.2);
    }

    let names = ["conv", "fc1 weights", "fc1 bias", "fc2 weights", "fc2 bias"];
    let mut probe = model.clone();
    for (p, analytic) in grads.tensors().into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        for i in 0..analytic.len() {
            let orig = probe.trainable()[p].data()[i];
            probe.trainable_mut()[p].data_mut()[i] = orig + STEP;
            let up = total_loss(&probe, &data);
            probe.trainable_mut()[p].data_mut()[i] = orig - STEP;
            let down = total_loss(&probe, &data);
            probe.trainable_mut()[p].data_mut()[i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            let a = analytic.data()[i];
            let scale = a.abs().max(numeric.abs());
            if scale > 0.0 {
                worst = worst.max((a - numeric).abs() / scale);
            }
        }
        println!("{:<12} {:>4} params, max relative error {worst:.2e}", names[p], analytic.len());
    }
    Ok(())
}
