//! Deterministic parallel fan-out.
//!
//! Work is cut into fixed-size chunks independent of the thread count. Chunk
//! `i` of a job labelled `label` always draws from
//! `RngStream::new(stream_seed(seed, label), i)`, and chunk results come back
//! in chunk order, so every aggregate is a function of `(seed, label, total)`
//! alone.

use condhaar_core::RngStream;
use rayon::prelude::*;
use rayon::ThreadPool;

pub const CHUNK: usize = 2_000;

/// FNV-1a over the label, folded into the seed with a splitmix64 finalizer.
pub fn stream_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct Runner {
    seed: u64,
    pool: ThreadPool,
}

impl Runner {
    pub fn new(seed: u64, threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
        Ok(Self { seed, pool })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// A single stream for sequential work.
    pub fn stream(&self, label: &str) -> RngStream {
        RngStream::new(stream_seed(self.seed, label), u64::MAX)
    }

    /// Runs `f(rng, len)` on each chunk of `total` items; results in chunk order.
    pub fn chunks<T, F>(&self, label: &str, total: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RngStream, usize) -> T + Sync,
    {
        let key = stream_seed(self.seed, label);
        let chunk = chunk.max(1);
        let count = total.div_ceil(chunk);
        self.pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let len = chunk.min(total - i * chunk);
                    let mut rng = RngStream::new(key, i as u64);
                    f(&mut rng, len)
                })
                .collect()
        })
    }

    /// `total` draws of `draw`, concatenated in chunk order.
    pub fn samples<T, F>(&self, label: &str, total: usize, draw: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RngStream) -> T + Sync,
    {
        self.chunks(label, total, CHUNK, |rng, len| (0..len).map(|_| draw(rng)).collect::<Vec<T>>())
            .into_iter()
            .flatten()
            .collect()
    }

    /// Folds each chunk into an accumulator, then merges accumulators in order.
    pub fn fold<A, F, M>(&self, label: &str, total: usize, init: A, step: F, merge: M) -> A
    where
        A: Clone + Send + Sync,
        F: Fn(&mut A, &mut RngStream) + Sync,
        M: Fn(&mut A, &A),
    {
        let parts = self.chunks(label, total, CHUNK, |rng, len| {
            let mut acc = init.clone();
            for _ in 0..len {
                step(&mut acc, rng);
            }
            acc
        });
        let mut out = init;
        for p in &parts {
            merge(&mut out, p);
        }
        out
    }
}
