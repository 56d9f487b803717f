// Shared helpers for the integration and acceptance tests. Not every target
// uses every helper.
#![allow(dead_code)]

use std::path::PathBuf;

use synaptogen::datasets::{LabeledDataset, Split};
use synaptogen::model::{build_model, Architecture, Arm, HiddenActivation, Model, TrainConfig};
use synaptogen::numerics::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool_backward, maxpool_forward, relu,
    relu_backward, softmax_cross_entropy, KERNEL_SIZE,
};
use synaptogen::{Rng, Tensor};

pub const FD_STEP: f64 = 1e-5;

/// `|a − b| / max(|a|, |b|)`, with two exact zeros counting as agreement.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic.iter().zip(numeric).map(|(a, n)| rel_err(*a, *n)).fold(0.0, f64::max)
}

/// Central differences of `f` with respect to every entry of `x`.
pub fn numeric_grad(x: &mut [f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + FD_STEP;
            let up = f(x);
            x[i] = orig - FD_STEP;
            let down = f(x);
            x[i] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

pub fn random_tensor(rng: &mut Rng, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.standard_normal()).collect()).unwrap()
}

fn dot(a: &Tensor, b: &Tensor) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

fn with_data(like: &Tensor, data: &[f64]) -> Tensor {
    Tensor::new(like.shape().to_vec(), data.to_vec()).unwrap()
}

/// Direct six-loop cross-correlation used as the forward oracle.
pub fn naive_conv(input: &Tensor, kernels: &Tensor, biases: &Tensor, pad: usize) -> Vec<f64> {
    let (c_in, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    let k_out = kernels.shape()[0];
    let (oh, ow) = (h + 2 * pad + 1 - KERNEL_SIZE, w + 2 * pad + 1 - KERNEL_SIZE);
    let x = |c: usize, y: isize, xx: isize| -> f64 {
        if y < 0 || xx < 0 || y >= h as isize || xx >= w as isize {
            0.0
        } else {
            input.data()[(c * h + y as usize) * w + xx as usize]
        }
    };
    let mut out = vec![0.0; k_out * oh * ow];
    for k in 0..k_out {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = biases.data()[k];
                for c in 0..c_in {
                    for dy in 0..KERNEL_SIZE {
                        for dx in 0..KERNEL_SIZE {
                            let wv = kernels.data()[((k * c_in + c) * KERNEL_SIZE + dy) * KERNEL_SIZE + dx];
                            acc += wv * x(c, (oy + dy) as isize - pad as isize, (ox + dx) as isize - pad as isize);
                        }
                    }
                }
                out[(k * oh + oy) * ow + ox] = acc;
            }
        }
    }
    out
}

/// Max relative error of the conv input, kernel and bias gradients.
pub fn conv_grad_error(seed: u64) -> f64 {
    let mut rng = Rng::seed_from_u64(seed);
    let x = random_tensor(&mut rng, &[2, 7, 6]);
    let k = random_tensor(&mut rng, &[3, 2, 5, 5]);
    let b = random_tensor(&mut rng, &[3]);
    let g = random_tensor(&mut rng, &[3, 7, 6]);
    let grads = conv2d_backward(&x, &k, &g).unwrap();
    let loss = |x: &Tensor, k: &Tensor, b: &Tensor| dot(&conv2d_forward(x, k, b, 2).unwrap(), &g);

    let mut xd = x.data().to_vec();
    let nx = numeric_grad(&mut xd, |d| loss(&with_data(&x, d), &k, &b));
    let mut kd = k.data().to_vec();
    let nk = numeric_grad(&mut kd, |d| loss(&x, &with_data(&k, d), &b));
    let mut bd = b.data().to_vec();
    let nb = numeric_grad(&mut bd, |d| loss(&x, &k, &with_data(&b, d)));

    max_rel_err(grads.input.as_ref().unwrap().data(), &nx)
        .max(max_rel_err(grads.kernels.data(), &nk))
        .max(max_rel_err(grads.biases.data(), &nb))
}

/// Input values spread out so no pooling window holds a near tie.
fn distinct_values(rng: &mut Rng, shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    let mut vals: Vec<f64> = (0..n).map(|i| i as f64 * 0.01 - n as f64 * 0.005).collect();
    rng.shuffle(&mut vals);
    Tensor::new(shape.to_vec(), vals).unwrap()
}

pub fn pool_grad_error(seed: u64) -> f64 {
    let mut rng = Rng::seed_from_u64(seed);
    let x = distinct_values(&mut rng, &[2, 8, 8]);
    let mut worst: f64 = 0.0;
    for (size, stride) in [(2, 2), (4, 4)] {
        let (out, idx) = maxpool_forward(&x, size, stride).unwrap();
        let g = random_tensor(&mut rng, out.shape());
        let analytic = maxpool_backward(&idx, &g).unwrap();
        let mut xd = x.data().to_vec();
        let numeric = numeric_grad(&mut xd, |d| dot(&maxpool_forward(&with_data(&x, d), size, stride).unwrap().0, &g));
        worst = worst.max(max_rel_err(analytic.data(), &numeric));
    }
    worst
}

pub fn relu_grad_error(seed: u64) -> f64 {
    let mut rng = Rng::seed_from_u64(seed);
    let x = distinct_values(&mut rng, &[3, 5, 5]);
    let g = random_tensor(&mut rng, &[3, 5, 5]);
    let analytic = relu_backward(&x, &g).unwrap();
    let mut xd = x.data().to_vec();
    let numeric = numeric_grad(&mut xd, |d| dot(&relu(&with_data(&x, d)), &g));
    max_rel_err(analytic.data(), &numeric)
}

pub fn dense_grad_error(seed: u64) -> f64 {
    let mut rng = Rng::seed_from_u64(seed);
    let x = random_tensor(&mut rng, &[9]);
    let w = random_tensor(&mut rng, &[4, 9]);
    let b = random_tensor(&mut rng, &[4]);
    let g = random_tensor(&mut rng, &[4]);
    let grads = dense_backward(&x, &w, &g).unwrap();
    let loss = |x: &Tensor, w: &Tensor, b: &Tensor| dot(&dense_forward(x, w, b).unwrap(), &g);

    let mut xd = x.data().to_vec();
    let nx = numeric_grad(&mut xd, |d| loss(&with_data(&x, d), &w, &b));
    let mut wd = w.data().to_vec();
    let nw = numeric_grad(&mut wd, |d| loss(&x, &with_data(&w, d), &b));
    let mut bd = b.data().to_vec();
    let nb = numeric_grad(&mut bd, |d| loss(&x, &w, &with_data(&b, d)));
    max_rel_err(grads.input.data(), &nx)
        .max(max_rel_err(grads.weights.data(), &nw))
        .max(max_rel_err(grads.bias.data(), &nb))
}

pub fn softmax_grad_error(seed: u64) -> f64 {
    let mut rng = Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for label in 0..10 {
        let z = random_tensor(&mut rng, &[10]);
        let (_, analytic) = softmax_cross_entropy(&z, label).unwrap();
        let mut zd = z.data().to_vec();
        let numeric = numeric_grad(&mut zd, |d| softmax_cross_entropy(&with_data(&z, d), label).unwrap().0);
        worst = worst.max(max_rel_err(analytic.data(), &numeric));
    }
    worst
}

/// 8 random 16×16 images, 4 per class.
pub fn toy_dataset(seed: u64) -> LabeledDataset {
    let mut rng = Rng::seed_from_u64(seed);
    let images = random_tensor(&mut rng, &[8, 1, 16, 16]);
    LabeledDataset::new(images, vec![0, 1, 0, 1, 0, 1, 0, 1], "toy", Split::Train).unwrap()
}

pub fn toy_config(arm: Arm) -> TrainConfig {
    TrainConfig {
        arm,
        architecture: Architecture { num_kernels: 4, input_size: 16, hidden_units: 8, num_classes: 2 },
        hidden_activation: HiddenActivation::Relu,
        ..TrainConfig::default()
    }
}

pub fn toy_model(arm: Arm, seed: u64) -> Model {
    build_model(&toy_config(arm), 1, &mut Rng::seed_from_u64(seed)).unwrap()
}

fn total_loss(model: &Model, data: &LabeledDataset) -> f64 {
    (0..data.len()).map(|i| model.loss_and_grads(&data.image_tensor(i), data.labels[i] as usize).unwrap().0).sum()
}

/// Max relative error of the summed-loss gradient over every trainable
/// parameter of the shrunken, fully trainable model.
pub fn end_to_end_grad_error(seed: u64) -> f64 {
    let data = toy_dataset(seed);
    let model = toy_model(Arm::FullyTrained, seed);
    let mut analytic: Option<synaptogen::model::Gradients> = None;
    for i in 0..data.len() {
        let (_, _, g) = model.loss_and_grads(&data.image_tensor(i), data.labels[i] as usize).unwrap();
        match analytic.as_mut() {
            Some(acc) => acc.add_assign(&g),
            None => analytic = Some(g),
        }
    }
    let analytic = analytic.unwrap();
    let analytic_parts = analytic.tensors();

    let mut worst: f64 = 0.0;
    let mut probe = model.clone();
    for (p, a) in analytic_parts.iter().enumerate() {
        let n = a.len();
        let mut numeric = Vec::with_capacity(n);
        for i in 0..n {
            let orig = probe.trainable()[p].data()[i];
            probe.trainable_mut()[p].data_mut()[i] = orig + FD_STEP;
            let up = total_loss(&probe, &data);
            probe.trainable_mut()[p].data_mut()[i] = orig - FD_STEP;
            let down = total_loss(&probe, &data);
            probe.trainable_mut()[p].data_mut()[i] = orig;
            numeric.push((up - down) / (2.0 * FD_STEP));
        }
        worst = worst.max(max_rel_err(a.data(), &numeric));
    }
    worst
}

/// Dataset root: `$SYNAPTOGEN_DATA_DIR`, else `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("SYNAPTOGEN_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub fn mnist_available() -> bool {
    ["train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"]
        .iter()
        .all(|f| data_dir().join("mnist").join(f).is_file())
}

/// Kolmogorov–Smirnov critical value at α ≈ 0.001.
pub fn ks_critical(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

/// One-sample KS statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
}

/// Frobenius relative error of the 25×25 empirical covariance of `n`
/// center-surround kernels against the target matrix.
pub fn center_surround_cov_error(n: usize, seed: u64) -> f64 {
    use synaptogen::synapse_gen::{
        build_center_surround_cov, sample_center_surround, CenterSurroundParams, FIELD_SIZE,
    };
    let cov = build_center_surround_cov(FIELD_SIZE, &CenterSurroundParams::default()).unwrap();
    let draws = sample_center_surround(&mut Rng::seed_from_u64(seed), n, 1, &cov).unwrap();
    let d = FIELD_SIZE * FIELD_SIZE;
    let mut mean = vec![0.0; d];
    for v in draws.data().chunks_exact(d) {
        mean.iter_mut().zip(v).for_each(|(m, x)| *m += x);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut emp = vec![0.0; d * d];
    for v in draws.data().chunks_exact(d) {
        for a in 0..d {
            let da = v[a] - mean[a];
            for b in 0..d {
                emp[a * d + b] += da * (v[b] - mean[b]);
            }
        }
    }
    emp.iter_mut().for_each(|c| *c /= n as f64);
    synaptogen::numerics::frobenius_relative_error(&emp, cov.entries())
}

/// `per_class` random images for each of the ten classes, `[N, C, S, S]`
/// with integer pixel values in `[0, 255]`.
pub fn synthetic_dataset(per_class: usize, channels: usize, side: usize, seed: u64, split: Split) -> LabeledDataset {
    let mut rng = Rng::seed_from_u64(seed);
    let n = per_class * 10;
    let labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    let pixels: Vec<f64> = (0..n * channels * side * side).map(|_| (rng.next_u64() % 256) as f64).collect();
    LabeledDataset::new(Tensor::new(vec![n, channels, side, side], pixels).unwrap(), labels, "synthetic", split)
        .unwrap()
}

/// Writes a small MNIST-shaped IDX dataset under `root/mnist`.
pub fn write_synthetic_mnist(root: &std::path::Path, per_class_train: usize, per_class_test: usize) {
    use synaptogen::datasets::write_idx;
    let dir = root.join("mnist");
    std::fs::create_dir_all(&dir).unwrap();
    let train = synthetic_dataset(per_class_train, 1, 28, 1, Split::Train);
    let test = synthetic_dataset(per_class_test, 1, 28, 2, Split::Test);
    write_idx(&train, dir.join("train-images-idx3-ubyte"), dir.join("train-labels-idx1-ubyte")).unwrap();
    write_idx(&test, dir.join("t10k-images-idx3-ubyte"), dir.join("t10k-labels-idx1-ubyte")).unwrap();
}
