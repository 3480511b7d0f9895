//! Deterministic per-shot random streams.
//!
//! Every shot draws from its own generator, seeded from the master seed, the
//! shot index and a stream id. Results therefore do not depend on how shots
//! are distributed over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random number generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream ids separating independent uses of one shot index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Source = 1,
    Optics = 2,
    Detection = 3,
    Bootstrap = 4,
    Scan = 5,
}

/// One step of the splitmix64 generator.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(master, index, stream)` into a 64-bit seed.
pub fn derive_seed(master: u64, index: u64, stream: Stream) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(b ^ (stream as u64).wrapping_mul(0xAEF1_7502_108E_F2D9))
}

/// Generator for one shot and stream.
pub fn shot_rng(master: u64, index: u64, stream: Stream) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, index, stream))
}
