//! Seed derivation and permutation replicates.
//!
//! Contract: replicate `i` of a plan with seed `s` is driven by a ChaCha8
//! stream seeded with `derive_seed(s, i)`, where
//! `derive_seed(s, i) = splitmix64(s ^ splitmix64(i + 0x9E3779B97F4A7C15))`.
//! Per-word streams use `word_seed(s, w) = derive_seed(s, fnv1a64(w))`.
//! Shuffles are Fisher-Yates from the last position down, drawing
//! `j` uniformly in `0..=i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(GOLDEN)))
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn word_seed(seed: u64, word: &str) -> u64 {
    derive_seed(seed, fnv1a64(word.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    pub seed: u64,
    pub replicates: usize,
}

impl PermutationPlan {
    pub fn new(seed: u64, replicates: usize) -> Self {
        Self { seed, replicates }
    }

    pub fn replicate_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }

    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.replicate_seed(index))
    }

    pub fn shuffle<T>(&self, data: &mut [T], index: usize) {
        let mut rng = self.rng(index);
        fisher_yates(data, &mut rng);
    }

    pub fn permute<T: Clone>(&self, series: &[T], index: usize) -> Vec<T> {
        let mut out = series.to_vec();
        self.shuffle(&mut out, index);
        out
    }
}

pub(crate) fn fisher_yates<T, R: Rng + ?Sized>(data: &mut [T], rng: &mut R) {
    for i in (1..data.len()).rev() {
        let j = rng.random_range(0..=i);
        data.swap(i, j);
    }
}
