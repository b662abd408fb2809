//! Counter-style keyed randomness.
//!
//! The draw for `(seed, trial, vertex)` is word `2 * vertex` of ChaCha8 stream
//! `trial` under key `seed`, so it is a pure function of the three values.
//! Trials can run in any order on any thread without shared state.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `2^-53`
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

fn stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Map 64 random bits to `[0, 1)`.
pub fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * UNIT
}

/// Raw 64-bit draw for one vertex of one trial.
pub fn keyed_bits(seed: u64, trial: u64, vertex: u64) -> u64 {
    let mut rng = stream(seed, trial);
    rng.set_word_pos(u128::from(vertex) * 2);
    rng.next_u64()
}

/// Uniform `[0, 1)` draw for one vertex of one trial.
pub fn keyed_uniform(seed: u64, trial: u64, vertex: u64) -> f64 {
    to_unit(keyed_bits(seed, trial, vertex))
}

/// Draws for vertices `0..n` of one trial, in index order.
pub fn trial_uniforms(seed: u64, trial: u64, n: usize, out: &mut Vec<f64>) {
    let mut rng = stream(seed, trial);
    out.clear();
    out.extend((0..n).map(|_| to_unit(rng.next_u64())));
}
