//! Counter-based seeding: every (seed, stream, epoch, index) tuple owns an
//! independent ChaCha stream, so parallel workers draw the same numbers
//! regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domains keep streams used for different purposes apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Augment = 1,
    Shuffle = 2,
    RorSign = 3,
    Split = 4,
    Init = 5,
    Plant = 6,
    Synthetic = 7,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one item of one epoch.
pub fn counter_rng(seed: u64, stream: Stream, epoch: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(stream as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(key ^ splitmix64(epoch)));
    rng.set_stream(index);
    rng
}
