//! Worst-case queue lengths at a traffic light.
//!
//! Cars arrive with probability `p` per step; during a red step nobody
//! leaves, during a green step one car leaves with probability `q = 1 - p`.
//! This crate simulates the maximum queue length `M_n`, computes the
//! constants `χ_ℓ(p)` of its Gumbel-type law both in closed form and from
//! truncated transition matrices, and recovers exact algebraic forms from
//! high-precision decimals.

pub mod closedform;
pub mod model;
pub mod precision;
pub mod recognize;
pub mod simulate;
pub mod spectral;

pub use closedform::{ClosedFormError, PredictionTable, RadicalValue};
pub use model::{ModelError, ModelParams, Phase, Probability, Schedule};
pub use recognize::{IntPolynomial, RecognizeError};
pub use simulate::{Histogram, SimError};
pub use spectral::{ChiEstimate, SpectralError};

/// Version string embedded in generated files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
