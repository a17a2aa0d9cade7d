//! Deterministic stream derivation for seeded experiments.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream whose
//! seed is derived by mixing a master seed with the indices that identify
//! the draw site (cell index, replication index, ...). Results are therefore
//! a pure function of `(master_seed, indices)` and independent of thread
//! count and scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer. Used as a seed mixer, not as a generator.
#[inline]
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha stream for a draw site identified by `ids`, e.g. `[cell, rep]`.
pub fn stream_rng(master_seed: u64, ids: &[u64]) -> ChaCha8Rng {
    let mut s = mix(master_seed, 0x5353_4947_u64); // domain separation tag
    for &id in ids {
        s = mix(s, id);
    }
    ChaCha8Rng::seed_from_u64(s)
}
