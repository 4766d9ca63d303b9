//! Labeled random streams.
//!
//! Every random draw in a run comes from a ChaCha8 generator keyed by the
//! master seed and a 64-bit stream id. The stream id is a hash of the label
//! path that leads to it (purpose, instant, member, element, ...), so a draw
//! depends only on *where* it happens and never on the order in which work
//! units are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Top-level stream purposes.
pub mod purpose {
    pub const PERTURB: u64 = 0x5045_5254;
    pub const MARKET: u64 = 0x4D41_524B;
    pub const PAIRING: u64 = 0x5041_4952;
}

/// Per-element draw kinds inside a perturbation stream.
pub mod element {
    pub const LOAD: u64 = 1;
    pub const PV: u64 = 2;
    pub const WIND: u64 = 3;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    master: u64,
    key: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            key: splitmix(master),
        }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Derives a sub-stream. Children with different labels, or the same
    /// label under different parents, yield unrelated sequences.
    pub fn child(&self, label: u64) -> Self {
        Self {
            master: self.master,
            key: splitmix(self.key ^ splitmix(label.wrapping_add(0xD1B5_4A32_D192_ED03))),
        }
    }

    pub fn path(&self, labels: &[u64]) -> Self {
        labels.iter().fold(*self, |s, &l| s.child(l))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.key);
        rng
    }
}
