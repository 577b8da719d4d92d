//! Deterministic derived RNG streams.
//!
//! Every randomized routine in the crate draws from a ChaCha stream derived
//! from a master seed plus a list of context words (purpose tag, restart
//! index, ...). Results are therefore reproducible and independent of
//! scheduling when work items run concurrently.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream from `(seed, words...)`.
pub fn derive_rng(seed: u64, words: &[u64]) -> ChaCha8Rng {
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    for &w in words {
        state = splitmix64(&mut state)
            ^ w.wrapping_mul(0xFF51_AFD7_ED55_8CCD)
                .wrapping_add(0x2545_F491_4F6C_DD1D);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
