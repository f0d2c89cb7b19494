//! Counter-based random streams.
//!
//! Every random quantity in a run is drawn from a stream addressed by a
//! small tuple of integers (grid point, trial, purpose, ...), so results do
//! not depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one 64-bit key.
#[inline]
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0x6a09_e667_f3bc_c908, |acc, &w| {
        splitmix64(acc ^ splitmix64(w))
    })
}

/// Purpose tags, so two consumers addressed by the same indices never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Placement = 1,
    Shadowing = 2,
    Capacity = 3,
    Reference = 4,
    Selection = 5,
    Oracle = 6,
    Uplinks = 7,
    Profiles = 8,
}

/// A ChaCha8 stream keyed by the master seed, with the stream id derived from `path`.
pub fn stream(master: u64, purpose: Purpose, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    let mut words = Vec::with_capacity(path.len() + 1);
    words.push(purpose as u64);
    words.extend_from_slice(path);
    rng.set_stream(mix(&words));
    rng
}

/// A bare 64-bit key for consumers that build their own generator.
pub fn key(master: u64, purpose: Purpose, path: &[u64]) -> u64 {
    let mut words = Vec::with_capacity(path.len() + 2);
    words.push(master);
    words.push(purpose as u64);
    words.extend_from_slice(path);
    mix(&words)
}
