//! The reflected walk `S_j = max(S_{j-1} + X_j, 0)` and its running maximum.
//!
//! Each step consumes exactly one 32-bit draw. A Bernoulli(p) event is
//! `draw < round(p * 2^32)`, so both engines below read the stream in the
//! same order and produce the same path, not merely the same distribution.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::rng::RngStream;
use super::SimError;
use crate::model::{ModelParams, Phase, Schedule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueueState {
    /// Current queue length.
    pub s: u64,
    /// Running maximum of `s`.
    pub m: u64,
    /// Steps consumed.
    pub j: u64,
}

/// Integer thresholds over `[0, 2^32)` implementing the step law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepLaw {
    /// Red step: arrival iff `draw < arrive`.
    arrive: u64,
    /// Green step: departure iff `draw < depart`.
    depart: u64,
    /// Random lights: `+1` iff `draw < lazy_up`, `-1` iff `draw >= lazy_down`.
    lazy_up: u64,
    lazy_down: u64,
}

const TWO_32: u64 = 1 << 32;

fn scaled_threshold(p: &BigRational, scale: u64) -> u64 {
    let scaled = p * BigRational::from_integer(BigInt::from(scale));
    scaled.round().to_u64().unwrap_or(0).min(scale)
}

impl StepLaw {
    pub fn new(p: &BigRational) -> Self {
        let arrive = scaled_threshold(p, TWO_32);
        let half = scaled_threshold(p, TWO_32 / 2);
        StepLaw { arrive, depart: TWO_32 - arrive, lazy_up: half, lazy_down: TWO_32 / 2 + half }
    }

    pub fn from_params(params: &ModelParams) -> Self {
        StepLaw::new(params.p.value())
    }

    /// Arrival probability actually realised by the 32-bit threshold.
    pub fn effective_p(&self) -> f64 {
        self.arrive as f64 / TWO_32 as f64
    }
}

/// One step of the queue under a known light colour.
#[inline]
pub fn step(state: QueueState, phase: Phase, draw: u32, law: &StepLaw) -> QueueState {
    let d = u64::from(draw);
    let s = match phase {
        Phase::Red if d < law.arrive => state.s + 1,
        Phase::Green if d < law.depart => state.s.saturating_sub(1),
        _ => state.s,
    };
    QueueState { s, m: state.m.max(s), j: state.j + 1 }
}

/// One step under random lights: `+1`, `0`, `-1` with probabilities
/// `p/2`, `1/2`, `q/2`.
#[inline]
pub fn lazy_step(state: QueueState, draw: u32, law: &StepLaw) -> QueueState {
    let d = u64::from(draw);
    let s = if d < law.lazy_up {
        state.s + 1
    } else if d >= law.lazy_down {
        state.s.saturating_sub(1)
    } else {
        state.s
    };
    QueueState { s, m: state.m.max(s), j: state.j + 1 }
}

/// Runs `n` steps from the empty queue, one step at a time.
pub fn run_queue(params: &ModelParams, schedule: &Schedule, n: u64, stream: RngStream) -> QueueState {
    let law = StepLaw::from_params(params);
    let mut draws = stream.generator();
    let mut state = QueueState::default();
    match schedule.period_word() {
        None => {
            for _ in 0..n {
                state = lazy_step(state, draws.next_draw(), &law);
            }
        }
        Some(word) => {
            let mut idx = 0;
            for _ in 0..n {
                state = step(state, word[idx], draws.next_draw(), &law);
                idx += 1;
                if idx == word.len() {
                    idx = 0;
                }
            }
        }
    }
    state
}

/// Block-accelerated run for `DeterministicBlocks(ℓ)` schedules.
///
/// Within a red block the queue can only grow and within a green block it
/// can only shrink, so the maximum needs checking once per cycle, and the
/// clamped unit decrements of a green block collapse to `max(s - D, 0)`.
pub fn run_queue_blocked(
    params: &ModelParams,
    schedule: &Schedule,
    n: u64,
    stream: RngStream,
) -> Result<QueueState, SimError> {
    let Schedule::DeterministicBlocks(ell) = *schedule else {
        return Err(SimError::Contract(format!("block engine needs a block:<ell> schedule, got {schedule}")));
    };
    let law = StepLaw::from_params(params);
    let mut draws = stream.generator();
    let ell = u64::from(ell);
    let cycles = n / (2 * ell);
    let (mut s, mut m) = (0u64, 0u64);
    for _ in 0..cycles {
        let mut arrivals = 0;
        for _ in 0..ell {
            arrivals += u64::from(u64::from(draws.next_draw()) < law.arrive);
        }
        s += arrivals;
        m = m.max(s);
        let mut departures = 0;
        for _ in 0..ell {
            departures += u64::from(u64::from(draws.next_draw()) < law.depart);
        }
        s = s.saturating_sub(departures);
    }
    let mut state = QueueState { s, m, j: cycles * 2 * ell };
    for i in 0..n % (2 * ell) {
        let phase = if i < ell { Phase::Red } else { Phase::Green };
        state = step(state, phase, draws.next_draw(), &law);
    }
    Ok(state)
}
