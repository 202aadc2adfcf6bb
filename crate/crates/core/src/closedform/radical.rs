//! Exact nested-radical numbers `(A + B√D + C√(E + F√D)) / G`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ClosedFormError;
use crate::precision::{bits_for_digits, Fixed};

/// Trial-division bound used when extracting square factors.
///
/// Past this bound only a perfect-square cofactor is detected, which is
/// exact whenever the number is below `SQUARE_SEARCH_BOUND^3`.
const SQUARE_SEARCH_BOUND: u64 = 1 << 20;

/// Canonical value `(A + B√D + C√(E + F√D)) / G`.
///
/// Canonical means: `D` is square-free (`D = 1` when no outer radical is
/// present), the inner radicand `E + F√D` has no rational square factor in
/// its integer content, `G > 0`, and `gcd(A, B, C, G) = 1`. Two values built
/// from equivalent printed forms therefore compare equal field by field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicalValue {
    a: BigInt,
    b: BigInt,
    d: BigInt,
    c: BigInt,
    e: BigInt,
    f: BigInt,
    g: BigInt,
}

/// JSON shape of a [`RadicalValue`]; integers are written as strings so
/// that no consumer truncates them to doubles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct RadicalReport {
    pub A: String,
    pub B: String,
    pub D: String,
    pub C: String,
    pub E: String,
    pub F: String,
    pub G: String,
    pub decimal: String,
}

/// Splits `|n|` as `s^2 * r`, returning `(s, r)` with `r` square-free (up to
/// the limits described at [`SQUARE_SEARCH_BOUND`]).
pub fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.abs();
    if rest.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = 2u64;
    while p <= SQUARE_SEARCH_BOUND {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > rest {
            break;
        }
        let p2 = &pb * &pb;
        while rest.is_multiple_of(&p2) {
            rest /= &p2;
            square *= &pb;
        }
        if rest.is_multiple_of(&pb) {
            rest /= &pb;
            free *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() && is_perfect_square(&rest) {
        square *= rest.sqrt();
        rest = BigInt::one();
    }
    (square, free * rest)
}

fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

impl RadicalValue {
    /// Builds and canonicalises. `D` must be nonnegative and `G` nonzero.
    pub fn new(
        a: BigInt,
        b: BigInt,
        d: BigInt,
        c: BigInt,
        e: BigInt,
        f: BigInt,
        g: BigInt,
    ) -> Result<Self, ClosedFormError> {
        if g.is_zero() {
            return Err(ClosedFormError::ZeroDenominator);
        }
        if d.is_negative() {
            return Err(ClosedFormError::NegativeRadicand(d.to_string()));
        }
        let mut v = RadicalValue { a, b, d, c, e, f, g };
        v.canonicalize();
        Ok(v)
    }

    pub fn from_integers(parts: [i128; 7]) -> Result<Self, ClosedFormError> {
        let [a, b, d, c, e, f, g] = parts.map(BigInt::from);
        RadicalValue::new(a, b, d, c, e, f, g)
    }

    pub fn rational(r: &BigRational) -> Self {
        RadicalValue {
            a: r.numer().clone(),
            b: BigInt::zero(),
            d: BigInt::one(),
            c: BigInt::zero(),
            e: BigInt::zero(),
            f: BigInt::zero(),
            g: r.denom().clone(),
        }
        .canonicalized()
    }

    pub fn zero() -> Self {
        RadicalValue::rational(&BigRational::zero())
    }

    /// `a + b√d + c√(e + f√d)` with rational coefficients and integer `d`.
    pub fn from_rational_parts(
        a: &BigRational,
        b: &BigRational,
        d: &BigInt,
        c: &BigRational,
        e: &BigRational,
        f: &BigRational,
    ) -> Result<Self, ClosedFormError> {
        // √(e + f√d) = √(e h² + f h² √d) / h
        let h = lcm_of_denominators([e, f]);
        let h_sq = BigRational::from_integer(&h * &h);
        let e_int = (e * &h_sq).to_integer();
        let f_int = (f * &h_sq).to_integer();
        let c = c / BigRational::from_integer(h);
        let g = lcm_of_denominators([a, b, &c]);
        let gr = BigRational::from_integer(g.clone());
        let scale = |x: &BigRational| (x * &gr).to_integer();
        RadicalValue::new(scale(a), scale(b), d.clone(), scale(&c), e_int, f_int, g)
    }

    fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    fn canonicalize(&mut self) {
        if self.g.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
            self.g = -&self.g;
        }
        // outer radicand
        if self.d.is_zero() {
            self.b = BigInt::zero();
            self.f = BigInt::zero();
        } else {
            let (s, r) = square_split(&self.d);
            self.b *= &s;
            self.f *= &s;
            self.d = r;
        }
        if self.d.is_one() {
            self.a += &self.b;
            self.b = BigInt::zero();
            self.e += &self.f;
            self.f = BigInt::zero();
        }
        // inner radicand
        if self.c.is_zero() || (self.e.is_zero() && self.f.is_zero()) {
            self.c = BigInt::zero();
            self.e = BigInt::zero();
            self.f = BigInt::zero();
        } else {
            let content = self.e.gcd(&self.f);
            let (t, _) = square_split(&content);
            if !t.is_one() {
                let t2 = &t * &t;
                self.c *= &t;
                self.e /= &t2;
                self.f /= &t2;
            }
            if self.f.is_zero() && !self.e.is_negative() {
                if is_perfect_square(&self.e) {
                    self.a += &self.c * self.e.sqrt();
                    self.c = BigInt::zero();
                    self.e = BigInt::zero();
                } else if self.b.is_zero() || self.e == self.d {
                    // √e is a plain quadratic surd: fold it into B√D
                    let (s, r) = square_split(&self.e);
                    if self.b.is_zero() {
                        self.d = r;
                    }
                    self.b += &self.c * s;
                    self.c = BigInt::zero();
                    self.e = BigInt::zero();
                }
            }
        }
        if self.b.is_zero() && self.f.is_zero() {
            self.d = BigInt::one();
        }
        let common = [&self.b, &self.c, &self.g].iter().fold(self.a.abs(), |acc, x| acc.gcd(x));
        if common.is_zero() {
            self.g = BigInt::one();
        } else if !common.is_one() {
            self.a /= &common;
            self.b /= &common;
            self.c /= &common;
            self.g /= &common;
        }
        if self.a.is_zero() && self.b.is_zero() && self.c.is_zero() {
            self.g = BigInt::one();
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn e(&self) -> &BigInt {
        &self.e
    }
    pub fn f(&self) -> &BigInt {
        &self.f
    }
    pub fn g(&self) -> &BigInt {
        &self.g
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// Multiplies the value by a rational.
    pub fn scale(&self, r: &BigRational) -> Self {
        RadicalValue {
            a: &self.a * r.numer(),
            b: &self.b * r.numer(),
            c: &self.c * r.numer(),
            g: &self.g * r.denom(),
            ..self.clone()
        }
        .canonicalized()
    }

    /// Whether `E + F√D >= 0`, decided exactly.
    pub fn inner_radicand_nonnegative(&self) -> bool {
        let (e, f) = (&self.e, &self.f);
        match (e.is_negative(), f.is_negative()) {
            (false, false) => true,
            (true, true) => false,
            (false, true) => e * e >= f * f * &self.d,
            (true, false) => f * f * &self.d >= e * e,
        }
    }

    /// Value as a fixed-point number with at least `bits` accurate bits
    /// (up to a few units in the last place).
    pub fn to_fixed(&self, bits: u32) -> Result<Fixed, ClosedFormError> {
        if !self.inner_radicand_nonnegative() {
            return Err(ClosedFormError::NegativeRadicand(format!("{} + {}√{}", self.e, self.f, self.d)));
        }
        let size = [&self.b, &self.c, &self.f].iter().map(|x| x.bits()).max().unwrap_or(0) as u32;
        let work = bits + 2 * size + 64;
        let sqrt_d = Fixed::from_int(self.d.clone(), work).sqrt().expect("D >= 0");
        let inner = &Fixed::from_int(self.e.clone(), work) + &sqrt_d.mul_int(&self.f);
        let inner_root = if inner.is_negative() { Fixed::zero(work) } else { inner.sqrt().expect("checked") };
        let numerator =
            &(&Fixed::from_int(self.a.clone(), work) + &sqrt_d.mul_int(&self.b)) + &inner_root.mul_int(&self.c);
        Ok(numerator.div_int(&self.g).with_bits(bits))
    }

    /// Decimal text with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> Result<String, ClosedFormError> {
        Ok(self.to_fixed(bits_for_digits(digits + 4))?.to_decimal(digits))
    }

    pub fn to_f64(&self) -> Result<f64, ClosedFormError> {
        Ok(self.to_fixed(128)?.to_f64())
    }

    pub fn report(&self, digits: u32) -> Result<RadicalReport, ClosedFormError> {
        Ok(RadicalReport {
            A: self.a.to_string(),
            B: self.b.to_string(),
            D: self.d.to_string(),
            C: self.c.to_string(),
            E: self.e.to_string(),
            F: self.f.to_string(),
            G: self.g.to_string(),
            decimal: self.to_decimal(digits)?,
        })
    }
}

impl fmt::Display for RadicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = self.a.to_string();
        let mut term = |coef: &BigInt, body: String| {
            if coef.is_zero() {
                return;
            }
            out.push_str(if coef.is_negative() { " - " } else { " + " });
            if !coef.abs().is_one() {
                out.push_str(&coef.abs().to_string());
            }
            out.push_str(&body);
        };
        term(&self.b, format!("√{}", self.d));
        let inner = if self.f.is_zero() {
            format!("√{}", self.e)
        } else if self.f.is_negative() {
            format!("√({} - {}√{})", self.e, -&self.f, self.d)
        } else {
            format!("√({} + {}√{})", self.e, self.f, self.d)
        };
        term(&self.c, inner);
        write!(f, "({out})/{}", self.g)
    }
}
