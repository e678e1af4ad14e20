//! Seeded randomness with a replayable trace.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed plus the number of raw draws taken so far. Replaying the same seed
/// and reproducing the same calls yields the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTrace {
    pub seed: u64,
    pub draws: u64,
}

/// ChaCha8 generator that counts every word it hands out.
#[derive(Debug, Clone)]
pub struct TracedRng {
    seed: u64,
    draws: u64,
    inner: ChaCha8Rng,
}

impl TracedRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        TracedRng {
            seed,
            draws: 0,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed taken from system entropy. The seed is still recorded so the run
    /// can be replayed.
    pub fn from_entropy() -> Self {
        Self::seed_from_u64(rand::random())
    }

    /// Independent stream for worker `counter`, derived from this seed.
    pub fn derive(&self, counter: u64) -> Self {
        let mixed = self
            .seed
            .wrapping_add(counter.wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .rotate_left(17)
            ^ 0xd6e8_feb8_6659_fd93;
        Self::seed_from_u64(mixed)
    }

    pub fn trace(&self) -> SeedTrace {
        SeedTrace {
            seed: self.seed,
            draws: self.draws,
        }
    }
}

impl RngCore for TracedRng {
    fn next_u32(&mut self) -> u32 {
        self.draws += 1;
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.draws += dest.len().div_ceil(4) as u64;
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
