//! Counter-based random streams.
//!
//! Work is cut into fixed-size chunks and chunk `c` always draws from
//! stream `c` of a ChaCha8 generator keyed by the seed, so results do not
//! depend on how chunks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CHUNK: usize = 4096;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Half-open sample ranges of the chunks covering `0..total`.
pub fn chunks(total: usize) -> Vec<(u64, std::ops::Range<usize>)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c as u64, c * CHUNK..((c + 1) * CHUNK).min(total)))
        .collect()
}
