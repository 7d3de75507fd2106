//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha20 keyed by a 64-bit seed.
//! ChaCha is counter based, so independent streams are obtained by selecting
//! a stream number instead of reseeding. The uniform strategy draws its choice
//! at step `i` from `stream(seed, i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Name and version of the generator, recorded in reports.
pub const RNG_NAME: &str = "chacha20-stream/v1";

pub type LllRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> LllRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, stream: u64) -> LllRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
