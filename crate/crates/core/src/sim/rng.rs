//! Per-replication random substreams.
//!
//! The 64-bit scenario seed keys a ChaCha8 generator; replication `r` reads
//! stream `2r` for true values and stream `2r + 1` for measurement errors.
//! A replication's draws therefore depend only on `(seed, r)`, and a twin
//! scenario that differs only in its error moments sees the same true values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    TrueValues,
    Errors,
}

pub fn substream(seed: u64, replication: u64, which: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = match which {
        Substream::TrueValues => 0,
        Substream::Errors => 1,
    };
    rng.set_stream(replication.wrapping_mul(2).wrapping_add(offset));
    rng
}
