//! Seeded randomness.
//!
//! Every random object in this crate is driven by [`GameRng`], a ChaCha
//! stream cipher with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded from a
//! `u64` through `SeedableRng::seed_from_u64`. Uniform integers in a range
//! come from `rand 0.8`'s `gen_range`, and shuffles are `rand 0.8`'s
//! `SliceRandom::shuffle` (Fisher–Yates from the back, indices drawn as `u32`
//! when the bound fits). Both crates are pinned through `Cargo.lock`, so a
//! given `(k, seed)` yields the same game on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type GameRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for trial `index` of an experiment with `base_seed`.
///
/// The rule is `splitmix64(base_seed + (index + 1) * 0x9E3779B97F4A7C15)`
/// (wrapping arithmetic), i.e. the `index + 1`-th output of a SplitMix64
/// sequence started at `base_seed`. It depends only on the pair, never on
/// scheduling.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    let state = base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    splitmix64(state)
}

/// Human-readable statement of [`trial_seed`], echoed in reports.
pub const TRIAL_SEED_RULE: &str = "seed_i = splitmix64(base_seed + (i + 1) * 0x9E3779B97F4A7C15), wrapping u64";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
