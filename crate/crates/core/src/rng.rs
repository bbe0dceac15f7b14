//! Reproducible random streams.
//!
//! A [`SeededStream`] names a ChaCha8 keystream by `(seed, stream)`; the
//! output depends on nothing else, so replication `r` of an experiment can be
//! generated on any thread, in any order, on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type behind every stream.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    seed: u64,
    stream: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// An independent sub-stream, e.g. lane 0 for `X` and lane 1 for `Y`.
    pub fn child(&self, lane: u64) -> Self {
        Self {
            seed: mix(self.seed, lane),
            stream: self.stream,
        }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a new seed from a seed and a label.
pub fn mix(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label))
}
