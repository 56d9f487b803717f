use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Cross-entropy of `softmax(logits)` against a class index.
///
/// Returns the loss `−log softmax(logits)[label]`, computed with the maximum
/// logit subtracted, and its gradient `softmax(logits) − onehot(label)`.
pub fn softmax_cross_entropy(logits: &Tensor, label: usize) -> Result<(f64, Tensor)> {
    let z = logits.data();
    if label >= z.len() {
        return Err(Error::invalid(
            "softmax_cross_entropy",
            format!("label {label} out of range for {} classes", z.len()),
        ));
    }
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    let loss = sum.ln() - (z[label] - max);
    let mut grad: Vec<f64> = exp.iter().map(|e| e / sum).collect();
    grad[label] -= 1.0;
    Ok((loss, Tensor::new(logits.shape().to_vec(), grad)?))
}
