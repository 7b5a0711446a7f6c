//! Counter-style RNG derivation: `(master seed, SNR index)` fixes a ChaCha8
//! key and the frame index selects the stream, so every frame's randomness is
//! independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One step of SplitMix64.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 256-bit key for one SNR point.
pub fn point_key(master_seed: u64, snr_index: u64) -> [u8; 32] {
    let mut state = master_seed;
    splitmix64(&mut state);
    state ^= snr_index.wrapping_mul(0xD134_2543_DE82_EF95);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Generator for a single frame.
pub fn frame_rng(key: &[u8; 32], frame_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(frame_index);
    rng
}
