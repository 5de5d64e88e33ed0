//! Per-shot random substreams.
//!
//! Every shot gets its own ChaCha8 generator keyed by `(seed, stream, index)`,
//! so results do not depend on how shots are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream tag for the ancilla-measurement draws.
pub const QUANTUM_STREAM: u64 = 0x5155_414e_5455_4d00;
/// Stream tag for the classical baseline's input draws.
pub const CLASSICAL_STREAM: u64 = 0x434c_4153_5349_4300;

/// SplitMix64 finalizer.
pub fn mix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for shot `index` of `stream` under the run seed `seed`.
pub fn substream_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ stream) ^ index)
}

pub fn substream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, stream, index))
}

/// The uniform draw in `[0, 1)` that decides the ancilla outcome of a shot.
pub fn shot_uniform(seed: u64, index: u64) -> f64 {
    substream(seed, QUANTUM_STREAM, index).random::<f64>()
}

/// An independent run seed derived from `seed`, e.g. for a second method
/// compared against the first.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix64(seed.rotate_left(17) ^ mix64(label))
}
