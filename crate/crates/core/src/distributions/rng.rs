use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream id for the `index`-th replication's noise draws.
pub fn noise_stream(index: u64) -> u64 {
    index << 1
}

/// Stream id for the `index`-th chain (or replication's estimator).
pub fn chain_stream(index: u64) -> u64 {
    (index << 1) | 1
}

/// Deterministic random stream identified by `(seed, stream)`.
///
/// Backed by ChaCha8 with the 64-bit stream selector, so distinct stream ids
/// under one master seed are independent and the sequence is identical on
/// every platform. Streams are split as follows: replication `r` of a
/// benchmark draws its noise from [`noise_stream`]`(r)` and runs its
/// estimator on [`chain_stream`]`(r)`; a standalone denoise uses
/// `chain_stream(0)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
