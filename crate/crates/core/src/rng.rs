//! Deterministic counter-based random-number streams.
//!
//! Every Monte-Carlo sample draws from its own ChaCha8 stream keyed by
//! `(seed, sample index)`, so results do not depend on how samples are
//! distributed across worker threads. Blocks of samples are mapped in
//! parallel and their accumulators are merged in index order, which keeps
//! reports bitwise identical for any worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of samples handled per parallel work item.
pub const BLOCK_SIZE: u64 = 1024;

/// RNG stream for one sample: ChaCha8 seeded by `seed` on stream `index`.
#[inline]
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run `f` on a dedicated pool with the given worker count. Results are
/// bitwise identical for any count because all reductions are block-ordered.
pub fn with_worker_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> crate::error::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::error::Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Map sample indices `0..n_samples` in parallel blocks and reduce the
/// per-block accumulators sequentially in block order.
///
/// `block_fn` receives the half-open index range of its block and must be a
/// pure function of those indices (draw randomness via [`sample_stream`]).
pub fn parallel_blocks<A, F, M>(n_samples: u64, block_fn: F, mut merge: M) -> A
where
    A: Default + Send,
    F: Fn(std::ops::Range<u64>) -> A + Sync,
    M: FnMut(&mut A, A),
{
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let partials: Vec<A> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK_SIZE;
            let hi = (lo + BLOCK_SIZE).min(n_samples);
            block_fn(lo..hi)
        })
        .collect();
    let mut acc = A::default();
    for p in partials {
        merge(&mut acc, p);
    }
    acc
}
