//! Counter-derived random streams.
//!
//! Every sampled item `i` of a run with seed `s` draws from its own ChaCha
//! stream `(s, i)`, so results never depend on the order items are computed in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent generator for item `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Generator for run-level choices (permutations and the like) that are not
/// tied to an item index.
pub fn run_rng(seed: u64) -> StreamRng {
    stream(seed, u64::MAX)
}
