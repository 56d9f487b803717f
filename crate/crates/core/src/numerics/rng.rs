use rand::seq::SliceRandom;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seedable pseudo-random source.
///
/// Backed by ChaCha8, so a given seed yields the same stream on every
/// platform. Standard-normal draws use the ziggurat transform of
/// `rand_distr::StandardNormal` applied to the uniform stream.
///
/// An `Rng` is single-owner state. Work that runs in parallel takes a
/// [`Rng::child`] or a generator seeded via [`derive_seed`].
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Rng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// The seed this generator was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[low, high)`.
    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// `+1.0` or `-1.0` with equal probability.
    pub fn rademacher(&mut self) -> f64 {
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Fisher–Yates shuffle in place.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }

    /// A new generator seeded from the next draw of this one.
    pub fn child(&mut self) -> Rng {
        Rng::seed_from_u64(self.next_u64())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically mixes a parent seed with a path of integer components
/// (kernel index, run index, hashed names, ...) into a child seed.
///
/// Each component is folded in with SplitMix64 finalisation, so distinct
/// paths produce unrelated seeds and the result never depends on the order
/// in which parallel work is scheduled.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(parent), |acc, &part| splitmix64(acc ^ splitmix64(part)))
}

/// 64-bit FNV-1a of a label, for use as a [`derive_seed`] component.
pub fn hash_label(label: &str) -> u64 {
    use std::hash::Hasher;
    let mut hasher = fnv::FnvHasher::default();
    hasher.write(label.as_bytes());
    hasher.finish()
}
