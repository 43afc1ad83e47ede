//! splitmix64 generator and per-sample child streams.
//!
//! Every random decision in the crate goes through [`DeterministicRng`], so a
//! run is fully determined by its master seed. Samples get their own child
//! stream via [`child_rng`], which makes results independent of scheduling.

use std::convert::Infallible;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

// Multiplicative inverse of GOLDEN_GAMMA mod 2^64, used to recover draw counts
// from the state difference.
const GOLDEN_GAMMA_INV: u64 = {
    let mut inv: u64 = 1;
    let mut i = 0;
    while i < 6 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(GOLDEN_GAMMA.wrapping_mul(inv)));
        i += 1;
    }
    inv
};

/// splitmix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicRng {
    state: u64,
}

impl DeterministicRng {
    pub fn new(state: u64) -> Self {
        DeterministicRng { state }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[a, b)`; returns `a` when `a == b`.
    #[inline]
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.next_f64()
    }

    /// Uniform integer in `[0, n)` from a single draw. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Number of `next_u64` calls made since `earlier` was cloned from this
    /// generator.
    pub fn draws_since(&self, earlier: &DeterministicRng) -> u64 {
        self.state
            .wrapping_sub(earlier.state)
            .wrapping_mul(GOLDEN_GAMMA_INV)
    }
}

/// Independent stream for sample `index` of a run seeded with `master_seed`.
pub fn child_rng(master_seed: u64, sample_index: u64) -> DeterministicRng {
    let salt = sample_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
    DeterministicRng::new(mix64(master_seed ^ salt))
}

// Lets rand_distr samplers (Beta, Poisson) draw from the same stream.
impl rand_core::TryRng for DeterministicRng {
    type Error = Infallible;

    fn try_next_u32(&mut self) -> Result<u32, Infallible> {
        Ok((self.next_u64() >> 32) as u32)
    }

    fn try_next_u64(&mut self) -> Result<u64, Infallible> {
        Ok(self.next_u64())
    }

    fn try_fill_bytes(&mut self, dst: &mut [u8]) -> Result<(), Infallible> {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
        Ok(())
    }
}
