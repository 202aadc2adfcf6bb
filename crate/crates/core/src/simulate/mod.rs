//! Monte Carlo simulation of traffic-light queue maxima.

mod compare;
mod engine;
mod histogram;
mod rng;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use compare::{compare_distributions, FitMetrics, LevelResidual};
pub use engine::{lazy_step, run_queue, run_queue_blocked, step, QueueState, StepLaw};
pub use histogram::{Histogram, SampleStats};
pub use rng::{Draws, RngStream};

use crate::model::{ModelParams, Schedule};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Contract(String),
    #[error("could not start worker pool: {0}")]
    Resources(String),
    #[error("empty histogram")]
    EmptyHistogram,
    #[error("prediction table sums to {0}, not 1")]
    UnnormalizedPrediction(f64),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Block engine for `block:<ell>` schedules, stepwise otherwise.
    #[default]
    Auto,
    Stepwise,
    Blocked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonteCarloConfig {
    pub n: u64,
    pub runs: u64,
    pub seed: u64,
    pub workers: usize,
    pub engine: Engine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub min: u64,
    pub max: u64,
    pub runs: u64,
    pub n: u64,
    pub p: String,
    pub ell: Option<u32>,
    pub schedule: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloResult {
    pub histogram: Histogram,
    pub summary: SimSummary,
}

/// Simulates `runs` independent queues; run `r` uses stream id `r`.
///
/// The histogram is folded in run order, so the result does not depend on
/// the number of workers.
pub fn monte_carlo(
    params: &ModelParams,
    schedule: &Schedule,
    config: &MonteCarloConfig,
) -> Result<MonteCarloResult, SimError> {
    if config.runs == 0 || config.workers == 0 {
        return Err(SimError::Contract("runs and workers must both be at least 1".into()));
    }
    let blocked = match (config.engine, schedule) {
        (Engine::Stepwise, _) => false,
        (Engine::Auto, Schedule::DeterministicBlocks(_)) => true,
        (Engine::Auto, _) => false,
        (Engine::Blocked, Schedule::DeterministicBlocks(_)) => true,
        (Engine::Blocked, other) => {
            return Err(SimError::Contract(format!("block engine needs a block:<ell> schedule, got {other}")))
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SimError::Resources(e.to_string()))?;
    let one_run = |r: u64| {
        let stream = RngStream::new(config.seed, r);
        if blocked {
            run_queue_blocked(params, schedule, config.n, stream).map(|st| st.m)
        } else {
            Ok(run_queue(params, schedule, config.n, stream).m)
        }
    };
    let maxima: Vec<u64> = pool.install(|| (0..config.runs).into_par_iter().map(one_run).collect::<Result<_, _>>())?;
    let histogram = Histogram::from_samples(maxima);
    let stats = SampleStats::from_histogram(&histogram).ok_or(SimError::EmptyHistogram)?;
    let ell = match schedule {
        Schedule::DeterministicBlocks(ell) => Some(*ell),
        _ => None,
    };
    let summary = SimSummary {
        mean: stats.mean,
        variance: stats.variance,
        stderr: stats.stderr,
        min: stats.min,
        max: stats.max,
        runs: config.runs,
        n: config.n,
        p: params.p.to_string(),
        ell,
        schedule: schedule.render(),
        seed: config.seed,
    };
    Ok(MonteCarloResult { histogram, summary })
}
