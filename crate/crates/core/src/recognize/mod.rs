//! Recognition of exact forms: minimal polynomials from decimals, nested
//! radicals from quartics, and integer polynomials from sample points.

mod fit;
mod lll;
mod minpoly;
mod nested;
mod polynomial;

use thiserror::Error;

pub use fit::{
    fit_int_poly, read_points_csv, rescale_scan, sample_points, write_points_csv, FitReport, GrowthRow, Point,
    MIN_HOLDOUT,
};
pub use lll::{lll_reduce, DELTA};
pub use minpoly::{decimal_digits, minimal_polynomial, MinPolyResult, HEIGHT_MARGIN_DIGITS};
pub use nested::{eval_radical_form, quartic_to_nested_radical};
pub use polynomial::{ComplexFixed, IntPolynomial};

use crate::closedform::ClosedFormError;

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error("{0}")]
    Precondition(String),
    #[error("no integer relation found (best candidate {candidate:?}, residual {residual})")]
    NoRelationFound { candidate: Option<String>, residual: String },
    #[error("no factorization: {0}")]
    NoFactorization(String),
    #[error("no real root of the requested shape")]
    NonRealBranch,
    #[error("no integer polynomial of degree <= {max_degree} fits the points")]
    NoIntegerFit { max_degree: usize },
    #[error("degree {degree} needs {needed} points for a verified fit, have {have}")]
    InsufficientPoints { degree: usize, needed: usize, have: usize },
    #[error("no fit with multipliers up to {max_multiplier} and degree <= {max_degree}")]
    NoRescaledFit { max_multiplier: u64, max_degree: usize },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
