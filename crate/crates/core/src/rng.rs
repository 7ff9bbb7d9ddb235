//! Keyed random streams. Every stream is a function of `(seed, key...)`
//! only, so work items draw the same numbers in any order and on any
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags used across the crate.
pub mod tag {
    pub const RESPONSE: u64 = 1;
    pub const COLUMN: u64 = 2;
    pub const NETWORK_ROW: u64 = 3;
    pub const OBSERVATION_NOISE: u64 = 4;
    pub const PERMUTATION: u64 = 5;
    pub const SPLIT: u64 = 6;
    pub const REPLICATION: u64 = 7;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `seed` and a key path into a 64-bit value.
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(seed), |h, &k| splitmix64(h ^ splitmix64(k)))
}

pub fn stream(seed: u64, keys: &[u64]) -> StreamRng {
    let a = derive(seed, keys);
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&splitmix64(a.wrapping_add(i as u64)).to_le_bytes());
    }
    StreamRng::from_seed(bytes)
}
