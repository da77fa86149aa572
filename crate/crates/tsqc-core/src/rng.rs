//! Seedable, splittable pseudo-random source for the Monte Carlo oracle.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood's SplitMix with Vigna's
//! 64-bit mix constants). It is hand-rolled rather than pulled from a crate
//! so the exact bit stream is pinned by this crate alone: reports carry
//! [`GENERATOR_ID`] and any implementation of the same algorithm reproduces
//! them.
//!
//! Splitting contract: trials are partitioned into fixed blocks of
//! [`BLOCK_SIZE`]; block `i` draws from a fresh stream seeded with
//! [`block_seed`]`(seed, i)`. Block streams are independent of worker count,
//! so parallel runs are bit-identical to sequential ones.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Algorithm identifier recorded in every report.
pub const GENERATOR_ID: &str = "splitmix64-v1:blocks=4096";

/// Trials per block in the parallel execution contract.
pub const BLOCK_SIZE: u64 = 4096;

/// SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64) / DEN
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }

    /// Pair of independent standard normal deviates (Box–Muller).
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let mut u1 = self.next_f64();
        // next_f64 can return exactly 0; ln(0) would blow up.
        while u1 <= 0.0 {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for block `index` split off the master `seed`:
/// `mix64(seed ^ mix64((index + 1) · GOLDEN_GAMMA))`.
pub fn block_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Sample an index from unnormalized nonnegative weights by cumulative walk.
/// Entries with non-positive weight are never selected; `r` must come from
/// [`SplitMix64::next_f64`] scaled by the weight total upstream, or the
/// weights must sum to ~1 with `r` in [0, 1).
pub fn sample_index(weights: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if r < acc {
            return i;
        }
    }
    last_positive
}
