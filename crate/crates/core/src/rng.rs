//! Reproducible random streams.
//!
//! Every random draw comes from ChaCha20 seeded with a 64-bit seed. Data
//! generation and fit initialization read different ChaCha streams of the
//! same seed, and replicate `r` of a study with master seed `s` uses the
//! seed [`replicate_seed`]`(s, r)`, so any replicate can be rerun on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stream identifiers within one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Data = 0,
    Init = 1,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `replicate` under master seed `master`.
pub fn replicate_seed(master: u64, replicate: u64) -> u64 {
    splitmix64(splitmix64(master) ^ replicate.wrapping_mul(0xD1B5_4A32_D192_ED03))
}
