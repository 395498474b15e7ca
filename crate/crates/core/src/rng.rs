//! Reproducible random streams.
//!
//! A stream is identified by `(seed, stream id)`. The generator is ChaCha8,
//! whose output is a pure function of key, stream and block counter, so a
//! given pair reproduces the same sequence on every platform and distinct
//! stream ids give independent sequences.
//!
//! Monte Carlo work is split into fixed-size chunks. Chunk `i` of a job
//! tagged `tag` draws from stream `(tag << 32) | i`, and results are
//! reduced in chunk order, so the outcome does not depend on how many
//! worker threads ran the chunks.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Default seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0xD1AC;

/// Draws per chunk in chunked Monte Carlo loops.
pub const CHUNK_SIZE: usize = 4096;

/// Job tags; they keep the stream ids of unrelated computations disjoint.
pub mod tags {
    pub const SAMPLE: u32 = 1;
    pub const HCIZ: u32 = 2;
    pub const F1: u32 = 3;
    pub const SUM_WISHART: u32 = 4;
    pub const VERIFY: u32 = 5;
    pub const REFERENCE: u32 = 6;
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// Stream for chunk `chunk` of a job tagged `tag`.
    pub fn for_chunk(seed: u64, tag: u32, chunk: u32) -> Self {
        Self::new(seed, ((tag as u64) << 32) | chunk as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position of the underlying block counter, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Standard complex Gaussian: real and imaginary parts N(0, 1/2), so E|z|^2 = 1.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.standard_normal(), s * self.standard_normal())
    }
}

/// Splits `n` draws into chunks of [`CHUNK_SIZE`] and evaluates `work(rng, count)`
/// for each, in parallel, returning per-chunk results in chunk order.
pub fn run_chunked<T, F>(seed: u64, tag: u32, n: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync,
{
    let n_chunks = n.div_ceil(CHUNK_SIZE);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            let mut rng = RngStream::for_chunk(seed, tag, c as u32);
            work(&mut rng, count)
        })
        .collect()
}
