//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha20 generator. The master
//! [`Seed`] is expanded into the 256-bit ChaCha key with `seed_from_u64`, and
//! each purpose gets its own ChaCha stream id: the high 16 bits hold a fixed
//! [`Stream`] label and the low 48 bits an index (sample or restart number).
//! The layout is fixed, so streams are identical across platforms and runs.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// 64-bit master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Seed(pub u64);

/// Fixed labels for the independent substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u16)]
pub enum Stream {
    PureState = 1,
    MixedState = 2,
    FixedSpectrum = 3,
    EqualityClass = 4,
    Restart = 5,
    Spectrum = 6,
    Verify = 7,
    Child = 8,
}

const INDEX_MASK: u64 = (1 << 48) - 1;

impl Seed {
    /// Generator for `label`, substream `index`.
    pub fn stream(self, label: Stream, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(((label as u64) << 48) | (index & INDEX_MASK));
        rng
    }

    /// Child seed `index`, used to give each Monte-Carlo sample its own seed.
    pub fn child(self, index: u64) -> Seed {
        use rand::RngCore;
        Seed(self.stream(Stream::Child, index).next_u64())
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
