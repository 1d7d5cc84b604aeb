//! Seeded randomness. Every random choice in the crate is drawn from a
//! ChaCha8 stream derived from one master seed and a list of stream labels,
//! so that distinct call sites never share randomness.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives independent child streams from a master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSplitter {
    master: u64,
}

impl StreamSplitter {
    pub fn new(master: u64) -> Self {
        StreamSplitter { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Seed for the stream named by `labels` (e.g. `[level, iteration, purpose]`).
    pub fn seed_for(&self, labels: &[u64]) -> u64 {
        let mut h = splitmix(self.master);
        for &l in labels {
            h = splitmix(h ^ splitmix(l.wrapping_add(0x51_7C_C1_B7)));
        }
        h
    }

    pub fn stream(&self, labels: &[u64]) -> Rng {
        seeded(self.seed_for(labels))
    }

    /// A splitter whose streams are all disjoint from this one's other children.
    pub fn child(&self, labels: &[u64]) -> StreamSplitter {
        StreamSplitter {
            master: self.seed_for(labels),
        }
    }
}

/// Draws a fresh child splitter out of an existing stream.
pub fn split_from(rng: &mut Rng) -> StreamSplitter {
    use rand::RngCore;
    StreamSplitter::new(rng.next_u64())
}
