//! Seed splitting.
//!
//! Every stochastic component draws from its own ChaCha stream selected by a
//! fixed label, so results do not depend on evaluation order or threading.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, label: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng
}

/// Label for the `index`-th member of a family of streams.
pub fn sub_label(family: u64, index: u64) -> u64 {
    family.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index
}
