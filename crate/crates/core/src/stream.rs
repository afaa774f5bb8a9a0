//! Counter-addressed random streams.
//!
//! Every draw lives at a fixed position of a ChaCha8 keystream: the key comes
//! from the master seed, the stream id is the trial index, and the word
//! position encodes what the draw is for. A draw therefore never depends on
//! how many other draws were made before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Word offset of the random-assignment draws inside a trial's stream.
const ASSIGNMENT_WORD_OFFSET: u128 = 1 << 62;

pub(crate) fn trial_stream(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Stream positioned at the fading draw with flat tensor index `index`.
pub(crate) fn fading_stream(seed: u64, trial_index: u64, index: usize) -> ChaCha8Rng {
    let mut rng = trial_stream(seed, trial_index);
    rng.set_word_pos(2 * index as u128);
    rng
}

pub(crate) fn assignment_stream(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = trial_stream(seed, trial_index);
    rng.set_word_pos(ASSIGNMENT_WORD_OFFSET);
    rng
}

/// Unit-mean exponential draw by inversion of a uniform on the open interval
/// (0, 1), so the result is always strictly positive and finite.
pub(crate) fn unit_exponential(word: u64) -> f64 {
    let u = ((word >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64);
    -libm::log(u)
}
