//! Seed handling.
//!
//! Every randomized operation takes one user-facing seed and derives its own
//! independent stream from a fixed per-operation constant, so adding or
//! reordering checks never perturbs the samples another check draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream constants. Values are part of the reproducibility contract: change
/// one and every report produced under that operation changes.
pub mod stream {
    pub const SAMPLER: u64 = 1;
    pub const CONDITION_I: u64 = 2;
    pub const ALTERING: u64 = 3;
    pub const CONTRACTION: u64 = 4;
    pub const SEARCH: u64 = 5;
    pub const AXIOMS: u64 = 6;
    pub const CLOSURE: u64 = 7;
    pub const UNIQUENESS: u64 = 8;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the sub-seed for (seed, stream).
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Deterministic generator for one operation's stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}
