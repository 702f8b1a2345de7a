//! Deterministic sampling substrate.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Seeded random stream. Identical seeds produce identical draw sequences,
/// across runs and across platforms.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            stream: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.stream.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draws an index from a probability vector by inverse-CDF sampling.
    pub fn sample_index(&mut self, probs: &[f64]) -> usize {
        let u = self.next_unit();
        inverse_cdf_index(u, probs)
    }
}

/// Selects the first index whose cumulative mass strictly exceeds `u`.
///
/// This is the tie-free sampling rule used everywhere in the crate: it is
/// deterministic and stable under reordering-free table rebuilds. If
/// accumulated rounding error leaves `u` above the total mass, the last
/// index with positive mass is returned.
pub fn inverse_cdf_index(u: f64, probs: &[f64]) -> usize {
    assert!(!probs.is_empty(), "cannot sample from an empty vector");
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if cumulative > u {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}
