//! Derived random streams. Every consumer of randomness gets its own
//! ChaCha stream keyed off the master seed, so serial and parallel
//! execution orders produce identical data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LAYOUT_STREAM: u64 = 0;
const SESSION_STREAM: u64 = 1;

/// Stream used to lay out class means and covariances.
pub fn layout_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(LAYOUT_STREAM);
    rng
}

/// Single stream used to draw all session data for one benchmark.
pub fn session_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SESSION_STREAM);
    rng
}

/// Per-(session, class) stream for calibrated feature generation.
pub fn generation_rng(seed: u64, session: usize, class_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((session as u64 + 1) << 32 | (class_id as u64 + 2));
    rng
}
