//! Deterministic stream derivation. Every random draw in the pipeline comes
//! from a ChaCha8 stream addressed by (seed, stage, payload), so results never
//! depend on thread count or evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage namespace for stream tags. Occupies the top byte of the tag, leaving
/// 56 bits of payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Observer = 1,
    Baseline = 2,
    Optimizer = 3,
}

/// Generator for one named unit of work. The same (seed, stage, payload)
/// triple always yields the same stream.
pub fn substream(seed: u64, stage: Stage, payload: u64) -> ChaCha8Rng {
    debug_assert!(payload < 1 << 56, "payload must fit in 56 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stage as u64) << 56) | payload);
    rng
}

/// Payload addressing trial `trial` of work item `index`.
pub fn pair(index: usize, trial: usize) -> u64 {
    debug_assert!(index < 1 << 24, "index must fit in 24 bits");
    debug_assert!(trial < 1 << 32, "trial must fit in 32 bits");
    ((index as u64) << 32) | trial as u64
}

/// First `take` elements of a Fisher-Yates shuffle of `0..n`, i.e. a uniform
/// ordered sample without replacement.
pub fn draw_distinct(rng: &mut ChaCha8Rng, n: usize, take: usize) -> Vec<usize> {
    assert!(take <= n, "cannot draw {take} distinct values from 0..{n}");
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx
}
