//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes a root seed and derives an independent
//! ChaCha stream per task (pair index, dataset index, ...), so results do
//! not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in provenance.
pub const GENERATOR_NAME: &str = "ChaCha8";

/// Independent stream `task` of the generator seeded with `seed`.
pub fn stream(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
