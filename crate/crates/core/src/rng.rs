//! Counter-based random substreams.
//!
//! Trial `i` of a run seeded with `seed` always reads ChaCha8 stream `i`
//! keyed by `seed`, so results do not depend on how trials are split
//! across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Generator dedicated to one trial.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Trials handed to one parallel work item.
pub(crate) const BLOCK: u64 = 2048;

/// Splits `0..trials` into contiguous blocks in a fixed order.
pub(crate) fn blocks(trials: u64) -> Vec<std::ops::Range<u64>> {
    (0..trials.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(trials))
        .collect()
}
