//! Roots of `det(I - zW) = 0` for truncated cycle matrices, the spectral
//! estimate of `χ_ℓ(p)`, and the exact finite-`n` law of `M_n`.

mod banded;
mod exact;
mod solver;

use thiserror::Error;

pub use banded::{banded_pivots, green_kernel, red_kernel, BandedMatrix, BandedRationalMatrix, Divide};
pub use exact::{exact_max_cdf, exact_max_pmf, max_cdf_f64, max_pmf_f64, ExactPmf, PMF_TAIL};
pub use solver::{
    build_cycle_matrix, char_value, char_value_exact, chi_spectral, solve_z, solve_z_exact, ChiEstimate, ChiRow,
    DetValue, PrecisionPolicy, SweepOptions, ZRoot, EPS_CAP, EPS_START,
};

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("{0}")]
    Precondition(String),
    #[error("zero pivot while factoring {0}")]
    SingularPivot(String),
    #[error("no convergence: {message}")]
    NonConvergence { message: String, estimate: Option<Box<ChiEstimate>> },
    #[error(transparent)]
    Model(#[from] ModelError),
}
