//! Seeded random streams.
//!
//! Every trial of an ensemble draws from its own ChaCha8 stream, seeded with
//! `master_seed ^ splitmix64(trial)`, so results do not depend on which
//! thread runs which trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolitaireRng = ChaCha8Rng;

/// The SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master_seed`.
pub fn stream_seed(master_seed: u64, index: u64) -> u64 {
    master_seed ^ splitmix64(index)
}

pub fn stream(master_seed: u64, index: u64) -> SolitaireRng {
    ChaCha8Rng::seed_from_u64(stream_seed(master_seed, index))
}
