//! Shared inputs for the benchmarks.

use num_rational::BigRational;
use tlqueue_core::{ModelParams, Probability};

/// `p = 1/3`, the reference case throughout.
pub fn one_third() -> BigRational {
    BigRational::new(1.into(), 3.into())
}

pub fn params(ell: u32) -> ModelParams {
    ModelParams::new(Probability::rational(1, 3), ell).expect("ell >= 1")
}

/// `(49 + 9√17)/256` to 60 places.
pub const CHI2_DECIMAL: &str = "0.336359182150620878704658940249088645415331222767041343396826";
