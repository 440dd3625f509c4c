//! Deterministic seed derivation.
//!
//! Every stochastic step derives its RNG from the global seed plus a stable
//! identifier (meter id, replicate index), never from shared mutable RNG
//! state. That makes results independent of scheduling: the same seed gives
//! byte-identical output whether work runs on one thread or many.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a cheap, well-mixed 64-bit hash step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Combine a base seed with a salt (e.g. a replicate index) into a new seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// FNV-1a hash of a string, for deriving per-meter seeds from meter ids.
fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seed for all randomness attached to one meter under a global seed.
pub fn seed_for_meter(global_seed: u64, meter_id: &str) -> u64 {
    mix_seed(global_seed, fnv1a(meter_id))
}

/// Construct the stream cipher RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
