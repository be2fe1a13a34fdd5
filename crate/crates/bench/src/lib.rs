//! Shared fixtures for the benchmarks.

use lenia_core::lenia::DynamicsParams;
use lenia_core::pattern::Pattern;
use lenia_core::rng::{stream_rng, Stream};
use rand::Rng as _;

pub fn orbium_like(radius: u32) -> DynamicsParams {
    DynamicsParams {
        radius,
        time_scale: 10,
        mu: 0.15,
        sigma: 0.015,
        beta: [1.0, 0.0, 0.0],
    }
}

/// Uniform noise on a centered square covering half the grid.
pub fn noise_patch(size: usize, seed: u64) -> Pattern {
    let mut rng = stream_rng(seed, Stream::Evaluation, 0);
    let (lo, hi) = (size / 4, 3 * size / 4);
    Pattern::from_fn(size, |x, y| {
        if (lo..hi).contains(&x) && (lo..hi).contains(&y) {
            rng.random()
        } else {
            0.0
        }
    })
}
