use serde::{Deserialize, Serialize};

use crate::datasets::{LabeledDataset, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::numerics::Rng;

pub const DEFAULT_PER_CLASS: usize = 38;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub per_class: usize,
    pub seed: u64,
}

impl SubsampleSpec {
    pub fn new(per_class: usize, seed: u64) -> Self {
        SubsampleSpec { per_class, seed }
    }
}

/// Stratified draw of exactly `per_class` examples from each of the ten
/// classes.
///
/// Each class's index list (in source order) is Fisher–Yates shuffled and
/// its first `per_class` entries kept; the union is shuffled once more. All
/// shuffles come from one generator seeded with `spec.seed`, classes in
/// ascending order.
pub fn subsample_per_class(data: &LabeledDataset, spec: &SubsampleSpec) -> Result<LabeledDataset> {
    if spec.per_class == 0 {
        return Err(Error::invalid("subsample_per_class", "per_class must be positive"));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES];
    for (i, &l) in data.labels.iter().enumerate() {
        by_class[l as usize].push(i);
    }
    let mut rng = Rng::seed_from_u64(spec.seed);
    let mut chosen = Vec::with_capacity(spec.per_class * NUM_CLASSES);
    for (class, indices) in by_class.iter_mut().enumerate() {
        if indices.len() < spec.per_class {
            return Err(Error::InsufficientClass { class, available: indices.len(), requested: spec.per_class });
        }
        rng.shuffle(indices);
        chosen.extend_from_slice(&indices[..spec.per_class]);
    }
    rng.shuffle(&mut chosen);
    data.select(&chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::Split;
    use crate::numerics::Tensor;

    fn toy(per_class: usize) -> LabeledDataset {
        let n = per_class * NUM_CLASSES;
        let labels: Vec<u8> = (0..n).map(|i| (i % NUM_CLASSES) as u8).collect();
        let images = Tensor::new(vec![n, 1, 2, 2], (0..n * 4).map(|v| v as f64).collect()).unwrap();
        LabeledDataset::new(images, labels, "toy", Split::Train).unwrap()
    }

    #[test]
    fn stratified_and_sized() {
        let sub = subsample_per_class(&toy(50), &SubsampleSpec::new(38, 1)).unwrap();
        assert_eq!(sub.len(), 380);
        assert_eq!(sub.class_histogram(), [38; 10]);
    }

    #[test]
    fn full_class_is_a_permutation() {
        let data = toy(5);
        let sub = subsample_per_class(&data, &SubsampleSpec::new(5, 3)).unwrap();
        let mut firsts: Vec<u64> = (0..sub.len()).map(|i| sub.image(i)[0] as u64).collect();
        firsts.sort_unstable();
        let expected: Vec<u64> = (0..data.len()).map(|i| data.image(i)[0] as u64).collect();
        assert_eq!(firsts, expected);
    }

    #[test]
    fn deterministic_per_spec() {
        let data = toy(50);
        let a = subsample_per_class(&data, &SubsampleSpec::new(38, 7)).unwrap();
        let b = subsample_per_class(&data, &SubsampleSpec::new(38, 7)).unwrap();
        let c = subsample_per_class(&data, &SubsampleSpec::new(38, 8)).unwrap();
        assert!(a.images.bitwise_eq(&b.images));
        assert_eq!(a.labels, b.labels);
        assert!(!a.images.bitwise_eq(&c.images));
    }

    #[test]
    fn too_few_examples_rejected() {
        match subsample_per_class(&toy(5), &SubsampleSpec::new(6, 0)) {
            Err(Error::InsufficientClass { available: 5, requested: 6, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
