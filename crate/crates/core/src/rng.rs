//! Seeded, splittable randomness.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::{Elem, FieldSpec};

/// ChaCha8 stream keyed by a 64-bit seed. [`split`](SeededRng::split) derives an
/// independent stream from the same seed, so parallel workers stay reproducible.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A fresh seed from the operating system.
    pub fn entropy_seed() -> u64 {
        rand::rngs::OsRng.next_u64()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for `stream`; stream 0 is the parent's own.
    pub fn split(&self, stream: u64) -> SeededRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        SeededRng {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform field element.
    pub fn elem(&mut self, spec: &FieldSpec) -> Elem {
        Elem(self.inner.gen_range(0..spec.order()))
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
