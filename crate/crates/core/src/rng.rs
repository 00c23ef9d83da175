//! Seeded, splittable random streams.
//!
//! Every worker draws from its own ChaCha8 stream: the key comes from the
//! user seed and the 64-bit stream id selects an independent keystream, so
//! distinct ids never overlap and results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 20_240_521;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Independent sub-seed for a labelled task (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
