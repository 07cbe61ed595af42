//! Seed derivation shared by every component.
//!
//! All randomness in a run flows from one base seed. Components obtain their
//! own stream by mixing the base seed with a stable tag and an index, so adding
//! a new consumer never shifts the streams of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate. ChaCha is portable across platforms and
/// releases, which the byte-identical artifact contract depends on.
pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a child seed from `base` for the component named `tag`.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ fnv1a(tag)).wrapping_add(index))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
