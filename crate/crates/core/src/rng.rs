//! Deterministic random streams.
//!
//! Every parallel unit of work (path, replica, configuration) owns its own
//! stream seeded with `base_seed + index`, so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Stream number `index` derived from `base_seed`.
pub fn stream(base_seed: u64, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(index))
}
