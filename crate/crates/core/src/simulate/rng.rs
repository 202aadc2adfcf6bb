//! Reproducible random streams.
//!
//! Every run draws from ChaCha8 keyed by the 64-bit seed (little-endian in
//! the first eight key bytes, remaining key bytes zero) with the ChaCha
//! stream number set to the run's stream id. ChaCha is counter based, so a
//! run's draws depend only on `(seed, stream_id)` and never on how runs are
//! spread over threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn generator(&self) -> Draws {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        Draws(rng)
    }
}

/// Source of uniform 32-bit draws; one draw per queue step.
pub struct Draws(ChaCha8Rng);

impl Draws {
    #[inline]
    pub fn next_draw(&mut self) -> u32 {
        self.0.next_u32()
    }
}
