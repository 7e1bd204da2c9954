//! Seed derivation.
//!
//! Every random consumer gets its own ChaCha8 stream derived from a master
//! seed, so that adding or reordering consumers never shifts another one's
//! draws, and parallel work items own independent, reproducible streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `base` and a tag.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    mix(mix(base) ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// A generator seeded from `seed`.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream `stream` of the ChaCha generator keyed by `seed`. Streams of the same
/// key never overlap.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
