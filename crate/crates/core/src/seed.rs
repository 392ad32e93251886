//! Counter-based seed derivation.
//!
//! Every random draw in the pipeline is keyed by a path such as
//! `(master, NOISE, radio, burst, realization)`. Derived seeds depend only
//! on that path, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PHASE_NOISE: u64 = 0x5048_4e53;
pub const AWGN: u64 = 0x4157_474e;
pub const FOLDS: u64 = 0x464f_4c44;
pub const RELEVANCE: u64 = 0x5245_4c56;
pub const COHORT: u64 = 0x434f_4852;
pub const COLORATION: u64 = 0x434f_4c52;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `master` with each component of `path` in order.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, path))
}

/// Stable 64-bit key for a string (FNV-1a), used to key seeds by radio id.
pub fn key(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
