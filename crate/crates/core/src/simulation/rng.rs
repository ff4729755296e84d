//! Seed derivation for reproducible simulations.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Stream carrying the Gaussian-process path draws.
pub const PATH_STREAM: u64 = 0;
/// Stream carrying the measurement-noise draws.
pub const NOISE_STREAM: u64 = 1;

/// Seed of replication `index` in an experiment seeded with `base`.
#[inline]
pub fn replication_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// ChaCha8 generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
