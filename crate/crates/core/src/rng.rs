//! Seeded random streams.
//!
//! Every stochastic routine takes either an explicit seed or a `&mut SimRng`.
//! Independent work items (trajectories, episodes, sweep points) get their own
//! stream derived from a master seed and an index, so results do not depend on
//! execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream `index` of the generator family rooted at `seed`. Stream 0 is
/// the generator returned by [`rng_from_seed`].
pub fn derived_rng(seed: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
