//! Seeded random streams. Every trial derives its own stream from
//! `(seed, stream)` so results never depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform random signs packed as `+1/-1`.
pub fn random_signs<R: Rng>(rng: &mut R, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect()
}

/// Uniform random `m`-subset of `0..k`, sorted.
pub fn random_subset<R: Rng>(rng: &mut R, k: usize, m: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, k, m.min(k)).into_vec();
    idx.sort_unstable();
    idx
}

/// Mixes `tag` into `seed` (SplitMix64 finaliser) for nested seeding.
pub fn derive(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
