//! Seed derivation for reproducible nested randomness.
//!
//! Folds, model kinds and curve levels each get their own stream derived from
//! the experiment seed, so components can run in any order (or concurrently)
//! without changing results.

/// Derive a child seed from a base seed and a stream tag (SplitMix64 mix).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
