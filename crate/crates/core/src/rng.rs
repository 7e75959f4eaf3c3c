//! Seeded randomness.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded through
//! [`rng_from_seed`]. Independent streams for one experiment seed (split,
//! feature noise, model init, per-round init) are separated with
//! [`derive_seed`], a SplitMix64 finalizer over `seed ^ stream_tag`, so the
//! stream for one purpose never shifts when another purpose consumes more
//! numbers.
//!
//! Uniform sampling without replacement sorts the candidate indices first
//! and then runs a partial Fisher-Yates shuffle (`SliceRandom::partial_shuffle`
//! from `rand` 0.9). The lockfile pins that implementation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Stream tags for [`derive_seed`].
pub mod stream {
    pub const SPLIT: u64 = 0x5350_4C49_5400_0001;
    pub const NOISE: u64 = 0x4E4F_4953_4500_0002;
    pub const MODEL: u64 = 0x4D4F_4445_4C00_0003;
    pub const MAJORITY: u64 = 0x4D41_4A4F_5200_0004;
    pub const DROPOUT: u64 = 0x4452_4F50_0000_0005;
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `seed ^ tag`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = (seed ^ tag).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `amount` distinct items uniformly from `candidates`.
///
/// The candidates are sorted before sampling so the result depends only on
/// the candidate set, not on the order it was collected in. Returned indices
/// are sorted ascending.
pub fn sample_without_replacement(
    candidates: &[usize],
    amount: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut pool = candidates.to_vec();
    pool.sort_unstable();
    let amount = amount.min(pool.len());
    let (chosen, _) = pool.partial_shuffle(rng, amount);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen
}
