//! Stable seed derivation for per-task RNG streams.
//!
//! Experiment cells derive their generator from the master seed and a list of
//! labels, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedKey(u64);

impl SeedKey {
    pub fn new(master: u64) -> Self {
        SeedKey(splitmix64(master ^ 0x6c65_616b_7363_6f70))
    }

    pub fn with_u64(self, value: u64) -> Self {
        SeedKey(splitmix64(self.0 ^ splitmix64(value)))
    }

    pub fn with_str(self, label: &str) -> Self {
        self.with_u64(fnv1a(label.as_bytes()))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> TaskRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}
