use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// What a random draw is used for. Each purpose gets its own substreams so
/// that, for example, choosing a tracking policy never shifts the
/// pseudorange noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Pseudorange = 1,
    Outage = 2,
    RandomSelection = 3,
}

/// Deterministic substreams keyed by `(seed, purpose, a, b)`, typically
/// `a` = satellite id and `b` = epoch index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStreams {
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl NoiseStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
        let mut key = splitmix64(self.seed);
        key = splitmix64(key ^ purpose as u64);
        key = splitmix64(key ^ a);
        key = splitmix64(key ^ b);
        ChaCha8Rng::seed_from_u64(key)
    }

    /// Standard normal draw for `(purpose, a, b)`.
    pub fn gaussian(&self, purpose: Purpose, a: u64, b: u64) -> f64 {
        self.stream(purpose, a, b).sample(StandardNormal)
    }

    /// Uniform draw in [0, 1) for `(purpose, a, b)`.
    pub fn uniform(&self, purpose: Purpose, a: u64, b: u64) -> f64 {
        self.stream(purpose, a, b).random::<f64>()
    }
}
