//! Closed-form constants, Gumbel-type predictions and expected maxima.

mod chi;
mod gumbel;
mod radical;
mod table;

use thiserror::Error;

pub use chi::{
    chi3_components, chi3_integer_shape, chi_closed, chi_f64, eval_coefficients_at, eval_poly, Chi3Components,
    Chi3IntegerShape, A_COEFFS, B_COEFFS, CHI2_RATIONAL_COEFFS, C_COEFFS,
};
pub use gumbel::{
    expected_max, expected_max_decimal, gumbel_cdf, gumbel_pmf, linspace, read_strategy_csv, strategy_table,
    variance_max, write_strategy_csv, StrategyRow, EULER_GAMMA, GUMBEL_TAIL,
};
pub use radical::{square_split, RadicalReport, RadicalValue};
pub use table::{PredictionRow, PredictionTable};

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("p = {0} is outside the supported range")]
    ProbabilityRange(String),
    #[error("no formula for ell = {0}")]
    UnsupportedEll(u32),
    #[error("run length n = {0} is too short for the asymptotic law")]
    RunLength(u64),
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
