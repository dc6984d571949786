//! Seed derivation and per-stream generators.
//!
//! All randomness in the crate flows through ChaCha streams addressed by a
//! `(seed, stream)` pair. Replicates, environments and learners derive their
//! seeds from the master seed with [`mix`], so results do not depend on
//! thread scheduling or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives a child seed from a parent seed and a tag.
pub fn mix(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Derives a child seed from a parent seed and two tags.
pub fn mix2(seed: u64, tag_a: u64, tag_b: u64) -> u64 {
    mix(mix(seed, tag_a), tag_b)
}

/// Generator for the `(seed, stream)` address.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
