//! Counter-based Gaussian increments for the homodyne trajectories.
//!
//! Trajectory `index` of seed `seed` reads ChaCha8 stream `index`. Step `n`
//! consumes exactly four 32-bit words starting at word `4n`, turned into the
//! pair (measurement, decoherence) by Box-Muller. The increments of a step are
//! therefore fixed by (seed, index, step), whatever order trajectories run in.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::TWO_PI;

#[derive(Clone, Debug)]
pub struct NoiseStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
    step: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, trajectory_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trajectory_index);
        NoiseStream { seed, index: trajectory_index, rng, step: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trajectory_index(&self) -> u64 {
        self.index
    }

    /// Index of the next step to be drawn.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Jumps to step `n`.
    pub fn seek(&mut self, n: u64) {
        self.rng.set_word_pos(4 * n as u128);
        self.step = n;
    }

    /// Standard normal pair (measurement channel, decoherence channel).
    pub fn next_standard(&mut self) -> (f64, f64) {
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        self.step += 1;
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(TWO_PI * u2);
        (r * c, r * s)
    }

    /// Wiener increments over a step of length `dt`.
    pub fn next_increments(&mut self, dt: f64) -> (f64, f64) {
        let (a, b) = self.next_standard();
        let s = libm::sqrt(dt);
        (a * s, b * s)
    }
}
