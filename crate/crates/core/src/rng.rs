//! Keyed random streams.
//!
//! Every random draw is taken from a ChaCha8 stream addressed by
//! `(master seed, pair index, purpose)`. The master seed fixes the cipher key;
//! pair index and purpose select the 64-bit stream id. Streams never overlap,
//! so a pair's draws do not depend on how many other pairs were processed
//! before it, or on which thread processed it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Each purpose gets its own stream per pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    /// Superpixel count for the first image.
    CountFirst = 0,
    /// Superpixel count for the second image.
    CountSecond = 1,
    Selection = 2,
    Lambda = 3,
    /// Dataset-level pairing shuffle.
    Pairing = 4,
}

const PURPOSE_BITS: u32 = 4;

/// Stream factory for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairRng {
    seed: u64,
    pair_index: u64,
}

impl PairRng {
    pub fn new(seed: u64, pair_index: u64) -> Self {
        assert!(
            pair_index < (1 << (64 - PURPOSE_BITS)),
            "pair index {pair_index} too large for the stream id space"
        );
        Self { seed, pair_index }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pair_index(&self) -> u64 {
        self.pair_index
    }

    /// A fresh generator positioned at the start of the `(pair, purpose)` stream.
    pub fn stream(&self, purpose: Purpose) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.pair_index << PURPOSE_BITS) | purpose as u64);
        rng
    }
}
