//! Seed derivation.
//!
//! Every random source in a trial is a ChaCha8 stream keyed by the trial seed.
//! Particle `i` walks on stream `i`; the remaining sources use reserved streams
//! at the top of the range, so adding particles never perturbs anything else.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GRAPH_STREAM: u64 = u64::MAX;
pub const PLACEMENT_STREAM: u64 = u64::MAX - 1;
pub const INTERACTION_STREAM: u64 = u64::MAX - 2;
pub const SAMPLER_STREAM: u64 = u64::MAX - 3;
pub const AUX_STREAM: u64 = u64::MAX - 4;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn particle_stream(seed: u64, particle: usize) -> ChaCha8Rng {
    stream(seed, particle as u64)
}
