//! Seeded randomness with counter-based substreams.
//!
//! All randomness in the crate flows from a single 64-bit master seed.
//! Independent substreams are derived from `(master, domain, index)` by a
//! SplitMix64 chain, so a trial/block/restart gets the same stream whether
//! the work runs serially or on any number of threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Domain tags keep substreams for different purposes disjoint even when
/// their indices collide.
pub mod domain {
    pub const BLOCK_SAMPLE: u64 = 0x01;
    pub const CODEBOOK_X2: u64 = 0x02;
    pub const CODEBOOK_X1: u64 = 0x03;
    pub const TRIAL: u64 = 0x04;
    pub const RESTART: u64 = 0x05;
    pub const HASH_BIN: u64 = 0x06;
    pub const TEST: u64 = 0x07;
}

#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a deterministic substream for `(master, domain, index)`.
pub fn substream(master: u64, domain: u64, index: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    let mut state = splitmix64(master ^ splitmix64(domain ^ splitmix64(index)));
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// Substream indexed by two counters (e.g. codeword = (bin, message)).
pub fn substream2(master: u64, domain: u64, i: u64, j: u64) -> ChaCha12Rng {
    substream(master, domain, splitmix64(i).wrapping_add(j))
}

/// Stable 64-bit hash of a symbol sequence under a key.
///
/// Used to realise the pseudorandom binning function lazily: sequences are
/// never enumerated, each is hashed on demand. The chained SplitMix64
/// finalisation gives full avalanche per symbol.
pub fn stable_hash_seq(key: u64, symbols: &[usize]) -> u64 {
    let mut h = splitmix64(key ^ 0xa076_1d64_78bd_642f);
    for &s in symbols {
        h = splitmix64(h ^ (s as u64).wrapping_add(0x2545_f491_4f6c_dd1d));
    }
    splitmix64(h)
}
