//! Counter-based derivation of per-task RNG substreams.
//!
//! Monte Carlo trials are seeded as `substream(master, index)` so a trial's
//! draws depend only on the master seed and its own index, never on how the
//! trials are scheduled across workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of substream `index` under `master`.
///
/// Distinct indices under the same master always map to distinct seeds.
pub(crate) fn substream_seed(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Independent generator for substream `index` under `master`.
pub(crate) fn substream_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master, index))
}
