//! The constants `χ_ℓ(p)` for `ℓ = 0, 1, 2, 3`.
//!
//! `χ_0` and `χ_1` are rational in `p`; `χ_2` lives in `Q(√(1 + 4pq))`;
//! `χ_3` is a nested radical over `Q(θ)` with `θ² = 1 + 4pq + 16p²q²`:
//!
//! ```text
//! χ_3 = (q-p)² / (12 p q⁹) · [a + (q-p)² b θ + (q-p) √2 √(c + a b θ)]
//! ```
//!
//! with the polynomials `a`, `b`, `c` below.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ClosedFormError, RadicalValue};

/// Coefficients of `a(p)`, ascending powers.
pub const A_COEFFS: [i64; 9] = [1, -4, 10, -52, 226, -520, 640, -400, 100];
/// Coefficients of `b(p)`, ascending powers.
pub const B_COEFFS: [i64; 5] = [1, -2, 6, -8, 4];
/// Coefficients of `c(p)`, ascending powers.
pub const C_COEFFS: [i64; 15] =
    [1, -4, 16, -104, 506, -1808, 5604, -15576, 35574, -61160, 75152, -63440, 34840, -11200, 1600];
/// Rational part of the `χ_2` bracket, ascending powers.
pub const CHI2_RATIONAL_COEFFS: [i64; 5] = [1, 0, -8, 16, -8];

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn eval_poly(coeffs: &[i64], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| acc * x + rat(c))
}

fn eval_poly_f64(coeffs: &[i64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}

fn eval_poly_int(coeffs: &[i64], x: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, &c| acc * x + BigInt::from(c))
}

/// `x^deg · P(1/x)`: the polynomial with reversed coefficients, at integer `x`.
fn eval_reversed_int(coeffs: &[i64], x: &BigInt) -> BigInt {
    coeffs.iter().fold(BigInt::zero(), |acc, &c| acc * x + BigInt::from(c))
}

/// The exact ingredients of `χ_3(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chi3Components {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    /// `θ² = 1 + 4pq + 16p²q²`.
    pub theta_radicand: BigRational,
}

pub fn chi3_components(p: &BigRational) -> Chi3Components {
    let q = BigRational::one() - p;
    let pq = p * &q;
    Chi3Components {
        a: eval_poly(&A_COEFFS, p),
        b: eval_poly(&B_COEFFS, p),
        c: eval_poly(&C_COEFFS, p),
        theta_radicand: rat(1) + rat(4) * &pq + rat(16) * &pq * &pq,
    }
}

/// Writes `√(n/d)` as `√(n·d) / d`; returns `(n·d, 1/d)`.
fn rationalise_root(r: &BigRational) -> (BigInt, BigRational) {
    (r.numer() * r.denom(), BigRational::new(BigInt::one(), r.denom().clone()))
}

fn check_p(p: &BigRational) -> Result<(), ClosedFormError> {
    let half = BigRational::new(1.into(), 2.into());
    if !p.is_positive() || *p > half {
        return Err(ClosedFormError::ProbabilityRange(p.to_string()));
    }
    Ok(())
}

/// Exact `χ_ℓ(p)` for `ℓ ∈ {0, 1, 2, 3}` and `0 < p ≤ 1/2`.
pub fn chi_closed(ell: u32, p: &BigRational) -> Result<RadicalValue, ClosedFormError> {
    check_p(p)?;
    let q = BigRational::one() - p;
    let gap = &q - p;
    let gap2 = &gap * &gap;
    let zero = BigRational::zero();
    match ell {
        0 => Ok(RadicalValue::rational(&(p * &gap2 / (&q * &q)))),
        1 => Ok(RadicalValue::rational(&(p * &gap2 / (&q * &q * &q)))),
        2 => {
            let prefactor = &gap2 / (rat(4) * pow(&q, 6));
            let (d, inv) = rationalise_root(&(rat(1) + rat(4) * p * &q));
            let a = &prefactor * eval_poly(&CHI2_RATIONAL_COEFFS, p);
            let b = &prefactor * &gap * inv;
            RadicalValue::from_rational_parts(&a, &b, &d, &zero, &zero, &zero)
        }
        3 => {
            let comp = chi3_components(p);
            let prefactor = &gap2 / (rat(12) * p * pow(&q, 9));
            let (d, inv) = rationalise_root(&comp.theta_radicand);
            // θ = inv·√d
            let a = &prefactor * &comp.a;
            let b = &prefactor * &gap2 * &comp.b * &inv;
            // (q-p)·√2·√(c + abθ) = (q-p)·√(2c + 2ab·inv·√d)
            let c = &prefactor * &gap;
            let e = rat(2) * &comp.c;
            let f = rat(2) * &comp.a * &comp.b * &inv;
            RadicalValue::from_rational_parts(&a, &b, &d, &c, &e, &f)
        }
        other => Err(ClosedFormError::UnsupportedEll(other)),
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Double-precision `χ_ℓ(p)`, evaluated straight from the formulas.
pub fn chi_f64(ell: u32, p: f64) -> Result<f64, ClosedFormError> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(ClosedFormError::ProbabilityRange(p.to_string()));
    }
    let q = 1.0 - p;
    let gap = q - p;
    Ok(match ell {
        0 => p * gap * gap / (q * q),
        1 => p * gap * gap / q.powi(3),
        2 => {
            gap * gap / (4.0 * q.powi(6)) * (eval_poly_f64(&CHI2_RATIONAL_COEFFS, p) + gap * (1.0 + 4.0 * p * q).sqrt())
        }
        3 => {
            let a = eval_poly_f64(&A_COEFFS, p);
            let b = eval_poly_f64(&B_COEFFS, p);
            let c = eval_poly_f64(&C_COEFFS, p);
            let theta = (1.0 + 4.0 * p * q + 16.0 * p * p * q * q).sqrt();
            gap * gap / (12.0 * p * q.powi(9))
                * (a + gap * gap * b * theta + gap * std::f64::consts::SQRT_2 * (c + a * b * theta).sqrt())
        }
        other => return Err(ClosedFormError::UnsupportedEll(other)),
    })
}

/// `χ_3(1/x)` written over integers in its uncancelled shape
///
/// ```text
/// outer · [a + b·√radicand + sqrt_coeff·√(c + f·√radicand)] / denominator
/// ```
///
/// where every field is an integer polynomial in `x`. Reduced forms of the
/// same number can hide common factors; this shape keeps them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chi3IntegerShape {
    pub x: BigInt,
    /// `(x-2)²`.
    pub outer: BigInt,
    /// `x⁸ a(1/x)`.
    pub a: BigInt,
    /// `(x-2)² · x⁴ b(1/x)`.
    pub b: BigInt,
    /// `x⁴ + 4x²(x-1) + 16(x-1)² = x⁴ θ²`.
    pub radicand: BigInt,
    /// `x - 2`.
    pub sqrt_coeff: BigInt,
    /// `2 x¹⁴ c(1/x)`.
    pub c: BigInt,
    /// `2 · x⁸ a(1/x) · x⁴ b(1/x)`.
    pub f: BigInt,
    /// `12 (x-1)⁹`.
    pub denominator: BigInt,
}

/// Integer shape of `χ_3(1/x)` for an integer `x ≥ 2`.
pub fn chi3_integer_shape(x: i64) -> Result<Chi3IntegerShape, ClosedFormError> {
    if x < 2 {
        return Err(ClosedFormError::ProbabilityRange(format!("1/{x}")));
    }
    let xb = BigInt::from(x);
    let two_less = &xb - 2;
    let a = eval_reversed_int(&A_COEFFS, &xb);
    let b_rev = eval_reversed_int(&B_COEFFS, &xb);
    let x_less: BigInt = &xb - 1;
    Ok(Chi3IntegerShape {
        outer: &two_less * &two_less,
        b: &two_less * &two_less * &b_rev,
        radicand: xb.pow(4u32) + 4 * &xb * &xb * &x_less + 16 * &x_less * &x_less,
        sqrt_coeff: two_less,
        c: 2 * eval_reversed_int(&C_COEFFS, &xb),
        f: 2 * &a * &b_rev,
        denominator: BigInt::from(12) * x_less.pow(9u32),
        a,
        x: xb,
    })
}

impl Chi3IntegerShape {
    pub fn to_radical(&self) -> Result<RadicalValue, ClosedFormError> {
        RadicalValue::new(
            &self.outer * &self.a,
            &self.outer * &self.b,
            self.radicand.clone(),
            &self.outer * &self.sqrt_coeff,
            self.c.clone(),
            self.f.clone(),
            self.denominator.clone(),
        )
    }
}

/// Integer evaluation of a coefficient polynomial, used for regression data.
pub fn eval_coefficients_at(coeffs: &[i64], x: &BigInt) -> BigInt {
    eval_poly_int(coeffs, x)
}
