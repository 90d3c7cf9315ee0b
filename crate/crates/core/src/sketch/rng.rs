//! Deterministic random stream used by both sketches.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
//! Every draw consumes exactly one `u64`:
//!
//! * an index below `bound` is `(x · bound) >> 64` (multiply-high),
//! * a sign is `+1` when the top bit of `x` is clear and `−1` otherwise.
//!
//! Because draw widths are fixed, a sketch built for `n + 1` columns is a
//! prefix-extension of the sketch built for `n` columns with the same seed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, PartialEq)]
pub struct SketchRng {
    inner: ChaCha8Rng,
}

impl SketchRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Restores a stream from its key and position.
    pub fn from_parts(key: [u8; 32], word_pos: u128) -> Self {
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_word_pos(word_pos);
        Self { inner }
    }

    pub fn key(&self) -> [u8; 32] {
        self.inner.get_seed()
    }

    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }

    #[inline]
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let x = self.inner.next_u64();
        ((x as u128 * bound as u128) >> 64) as usize
    }

    #[inline]
    pub fn next_sign(&mut self) -> i8 {
        if self.inner.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}
