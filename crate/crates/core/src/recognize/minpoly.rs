use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::lll::lll_reduce;
use super::polynomial::IntPolynomial;
use super::RecognizeError;
use crate::precision::parse_decimal_ratio;

/// Digits of margin between the height of an accepted relation and the
/// height a chance relation would have.
pub const HEIGHT_MARGIN_DIGITS: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinPolyResult {
    #[serde(rename = "coeffs")]
    pub polynomial: IntPolynomial,
    /// `|poly(y)|` at the input value, in scientific notation.
    pub residual: String,
    #[serde(rename = "precision")]
    pub precision_used: u32,
}

/// Fractional digits carried by a decimal string (after applying any
/// exponent).
pub fn decimal_digits(text: &str) -> u32 {
    let t = text.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (t, 0),
    };
    let frac = mant.split_once('.').map(|(_, f)| f.len() as i64).unwrap_or(0);
    (frac - exp).max(0) as u32
}

pub(crate) fn log10_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top: f64 = num_traits::ToPrimitive::to_f64(&(x.abs() >> shift)).unwrap();
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

fn log10_ratio(r: &BigRational) -> f64 {
    log10_abs(r.numer()) - log10_abs(r.denom())
}

/// Scientific rendering of a rational's absolute value.
pub(crate) fn sci(r: &BigRational) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let l = log10_ratio(r);
    let e = l.floor();
    format!("{:.3}e{}", 10f64.powf(l - e), e as i64)
}

/// Smallest-degree integer polynomial vanishing at `y` (a decimal string),
/// by lattice reduction on `{1, y, …, y^d}` scaled by `10^precision`.
pub fn minimal_polynomial(y: &str, max_degree: usize, precision: u32) -> Result<MinPolyResult, RecognizeError> {
    if !(1..=8).contains(&max_degree) {
        return Err(RecognizeError::Precondition(format!("max_degree must be in 1..=8, got {max_degree}")));
    }
    let value = parse_decimal_ratio(y).ok_or_else(|| RecognizeError::Precondition(format!("not a decimal: {y:?}")))?;
    let available = decimal_digits(y);
    let prec = precision.min(available);
    if prec < 20 {
        return Err(RecognizeError::Precondition(format!(
            "need at least 20 digits, have {prec} (input carries {available})"
        )));
    }
    let scale = BigRational::from_integer(BigInt::from(10).pow(prec));
    let unit = BigRational::new(BigInt::one(), BigInt::from(10).pow(prec));
    let y_abs_max = value.abs().max(BigRational::one());
    let mut best: Option<(IntPolynomial, BigRational)> = None;

    for d in 1..=max_degree {
        let powers: Vec<BigRational> =
            std::iter::successors(Some(BigRational::one()), |x| Some(x * &value)).take(d + 1).collect();
        let mut basis: Vec<Vec<BigInt>> = (0..=d)
            .map(|i| {
                let mut row = vec![BigInt::zero(); d + 2];
                row[i] = BigInt::one();
                row[d + 1] = (&powers[i] * &scale).round().to_integer();
                row
            })
            .collect();
        lll_reduce(&mut basis)?;
        for row in &basis {
            let Ok(poly) = IntPolynomial::new(row[..=d].to_vec()) else { continue };
            let poly = poly.primitive();
            if poly.degree() == 0 {
                continue;
            }
            let residual = poly.eval_rational(&value).abs();
            let height = poly.coeffs().iter().map(|c| c.abs()).max().unwrap();
            let threshold = BigRational::from_integer(BigInt::from(100 * (d + 1)) * &height)
                * num_traits::pow(y_abs_max.clone(), d)
                * &unit;
            let height_ok = log10_abs(&height) <= f64::from(prec) / (d as f64 + 1.0) - HEIGHT_MARGIN_DIGITS;
            if best.as_ref().is_none_or(|(_, r)| residual < *r) {
                best = Some((poly.clone(), residual.clone()));
            }
            if height_ok && residual <= threshold && poly.is_irreducible() {
                return Ok(MinPolyResult { polynomial: poly, residual: sci(&residual), precision_used: prec });
            }
        }
    }
    let (candidate, residual) = match best {
        Some((p, r)) => (Some(p.render("y")), sci(&r)),
        None => (None, "n/a".into()),
    };
    Err(RecognizeError::NoRelationFound { candidate, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::RadicalValue;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn digits_counting() {
        assert_eq!(decimal_digits("0.125"), 3);
        assert_eq!(decimal_digits("12"), 0);
        assert_eq!(decimal_digits("1.5e-3"), 4);
    }

    #[test]
    fn rational_input() {
        let r = minimal_polynomial("0.50000000000000000000000000000", 3, 30).unwrap();
        assert_eq!(r.polynomial, poly(&[-1, 2]));
    }

    #[test]
    fn quadratic_surd() {
        let y = RadicalValue::from_integers([49, 9, 17, 0, 0, 0, 256]).unwrap().to_decimal(60).unwrap();
        let r = minimal_polynomial(&y, 4, 60).unwrap();
        assert_eq!(r.polynomial, poly(&[2, -49, 128]));
        assert_eq!(r.precision_used, 60);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["coeffs"][2], "128");
    }

    #[test]
    fn nested_radical_quartic() {
        let v = RadicalValue::from_integers([1393, 61, 217, 1, 2416130, 169946, 6144]).unwrap();
        let y = v.to_decimal(120).unwrap();
        let r = minimal_polynomial(&y, 6, 120).unwrap();
        assert_eq!(r.polynomial, poly(&[243, -25074, 432960, -2852864, 3145728]));
        // precision increase leaves the answer unchanged
        let y160 = v.to_decimal(160).unwrap();
        assert_eq!(minimal_polynomial(&y160, 6, 160).unwrap().polynomial, r.polynomial);
    }

    #[test]
    fn divides_other_annihilators() {
        let v = RadicalValue::from_integers([49, 9, 17, 0, 0, 0, 256]).unwrap();
        let r = minimal_polynomial(&v.to_decimal(80).unwrap(), 4, 80).unwrap();
        // (128y^2 - 49y + 2)(y^2 - 3) also vanishes at y
        let other = poly(&[-6, 147, -382, -49, 128]);
        assert!(r.polynomial.divides(&other));
    }

    #[test]
    fn transcendental_input_fails() {
        let pi = &crate::precision::PI_200[..62];
        match minimal_polynomial(pi, 2, 60) {
            Err(RecognizeError::NoRelationFound { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(minimal_polynomial("0.5", 2, 60).is_err());
        assert!(minimal_polynomial("0.5", 9, 60).is_err());
    }
}
