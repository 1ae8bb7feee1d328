//! Seeded randomness. All draws come from ChaCha8 keyed by a 64-bit seed and
//! a 64-bit stream id, so results do not depend on platform or on the order
//! in which entries are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn keyed(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Stream ids for the independent consumers of a user seed.
pub(crate) mod stream {
    pub const SAMPLE: u64 = 1 << 62;
    pub const RETRIEVAL: u64 = 1 << 61;
}
