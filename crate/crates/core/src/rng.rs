//! Seed derivation.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded through
//! [`derive_seed`]: the base seed is folded with a sequence of `u64` tags, each
//! fold being `state = splitmix64(state ^ splitmix64(tag + GOLDEN))`. Streams
//! that must not collide use distinct leading tags (see the `stream` constants
//! used by callers). Because seeds depend only on (base, tags), parallel and
//! serial execution draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(base), |state, &tag| {
        splitmix64(state ^ splitmix64(tag.wrapping_add(GOLDEN)))
    })
}

pub fn rng_from(base: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}

/// Leading tags separating independent random streams.
pub mod stream {
    pub const TRUTH: u64 = 1;
    pub const OBSERVATIONAL: u64 = 2;
    pub const STRATEGY: u64 = 3;
    pub const REAL_DATA: u64 = 4;
    pub const BOOTSTRAP: u64 = 5;
    pub const SYNTHETIC: u64 = 6;
    pub const RANDOM_DESIGN: u64 = 7;
    pub const CANDIDATES: u64 = 8;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_change_the_seed() {
        let a = derive_seed(7, &[1, 2]);
        assert_eq!(a, derive_seed(7, &[1, 2]));
        assert_ne!(a, derive_seed(7, &[2, 1]));
        assert_ne!(a, derive_seed(8, &[1, 2]));
        assert_ne!(derive_seed(7, &[]), derive_seed(7, &[0]));
    }
}
