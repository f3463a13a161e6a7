//! Deterministic substream plumbing for parallel Monte-Carlo runs.
//!
//! Trials are processed in fixed-size chunks. Each chunk owns a set of
//! ChaCha streams derived from the root seed and the chunk index, and the
//! per-chunk event counts are integers, so the reduction is identical no
//! matter how rayon schedules the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Trials per chunk. Fixed so that serial and parallel runs consume the
/// same substreams.
pub(crate) const CHUNK_TRIALS: u64 = 1 << 16;

/// Streams reserved per chunk: amplitudes, phases, noise, and data bits each
/// draw from their own stream, so skipping one category (e.g. forcing phases
/// to zero) cannot shift the others.
const LANES: u64 = 4;

#[derive(Clone, Copy)]
pub(crate) enum Lane {
    Amplitude = 0,
    Phase = 1,
    Noise = 2,
    Bits = 3,
}

pub(crate) fn lane_rng(seed: u64, chunk: u64, lane: Lane) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk * LANES + lane as u64);
    rng
}

/// Runs `count_in_chunk(chunk_index, chunk_len)` over all chunks of `total`
/// trials in parallel and returns the summed count.
pub(crate) fn parallel_chunk_count<F>(total: u64, count_in_chunk: F) -> u64
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    let n_chunks = total.div_ceil(CHUNK_TRIALS);
    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK_TRIALS;
            let len = CHUNK_TRIALS.min(total - lo);
            count_in_chunk(chunk, len)
        })
        .sum()
}
