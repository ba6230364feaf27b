//! Seed handling.
//!
//! Every stochastic routine takes a single `u64` master seed. Independent
//! sub-streams are obtained with [`stream_rng`]: the master seed keys a
//! ChaCha8 generator and the stream index selects one of its 2^64 disjoint
//! streams. Work is always split into fixed-size shards indexed from zero,
//! so results do not depend on how many threads execute them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Trials per shard for the sharded Monte Carlo loops.
pub const SHARD_SIZE: u64 = 2048;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `total` trials into `(shard_index, trials_in_shard)` pairs.
pub(crate) fn shards(total: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut idx = 0;
    while start < total {
        let len = SHARD_SIZE.min(total - start);
        out.push((idx, len));
        start += len;
        idx += 1;
    }
    out
}
