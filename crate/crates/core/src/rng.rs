//! Random stream discipline.
//!
//! Every replicate owns one ChaCha8 stream seeded from a per-replicate seed.
//! Per-replicate seeds come from the SplitMix64 counter sequence of the
//! master seed, so replicate `k` can be reconstructed without running
//! replicates `0..k`. Uniform reals are produced by [`unit_draw`] with a fixed
//! bit recipe so the draw sequence is reproducible outside of `rand`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index`: output `index + 1` of SplitMix64 started at `master_seed`.
pub fn replicate_seed(master_seed: u64, index: u32) -> u64 {
    let state = master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(u64::from(index) + 1));
    mix64(state)
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw on `[0, 1)`: the top 53 bits of one `next_u64`, scaled by 2^-53.
#[inline]
pub fn unit_draw<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw on `[lo, hi)`.
#[inline]
pub fn uniform_in<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_draw(rng)
}
