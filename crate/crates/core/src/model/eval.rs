use crate::datasets::LabeledDataset;
use crate::error::Result;
use crate::model::Model;

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Predicted class for every image of `data`.
pub fn predict(model: &Model, data: &LabeledDataset) -> Result<Vec<u8>> {
    (0..data.len()).map(|i| Ok(argmax(model.forward(&data.image_tensor(i))?.data()) as u8)).collect()
}

/// Fraction of `testset` classified correctly.
pub fn evaluate(model: &Model, testset: &LabeledDataset) -> Result<f64> {
    let predictions = predict(model, testset)?;
    let correct = predictions.iter().zip(&testset.labels).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / testset.len() as f64)
}
