//! Binary fixed-point reals of arbitrary precision.
//!
//! A [`Fixed`] is an integer mantissa over an implicit denominator `2^bits`.
//! Every value taking part in one computation carries the same `bits`; mixing
//! precisions is a logic error and is caught by debug assertions.
//!
//! Fixed point (rather than floating point) fits the determinant work here:
//! all quantities are bounded, and what matters is absolute resolution near
//! a root, which is exactly what a fixed binary scale provides.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Euler's constant to 200 decimal places.
pub const EULER_GAMMA_200: &str = "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144724980708248096050401448654283622417399764492353625350033374293733773767394279259525824709491600873";

/// π to 200 decimal places.
pub const PI_200: &str = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196442";

/// Number of binary digits needed to carry `digits` decimal digits, plus a
/// few guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed { mant: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        Fixed { mant: BigInt::one() << bits, bits }
    }

    pub fn from_int(n: impl Into<BigInt>, bits: u32) -> Self {
        Fixed { mant: n.into() << bits, bits }
    }

    /// Rounds `r` to the nearest representable value.
    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let num: BigInt = r.numer() << bits;
        let den = r.denom();
        // round half up: floor((2 num + den) / (2 den))
        let mant = (num * BigInt::from(2) + den).div_floor(&(den * BigInt::from(2)));
        Fixed { mant, bits }
    }

    /// Parses plain or scientific decimal text.
    pub fn from_decimal(text: &str, bits: u32) -> Option<Self> {
        parse_decimal_ratio(text).map(|r| Fixed::from_ratio(&r, bits))
    }

    pub fn from_f64(x: f64, bits: u32) -> Option<Self> {
        BigRational::from_float(x).map(|r| Fixed::from_ratio(&r, bits))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    /// Exact rational value of this number.
    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.mant.bits().saturating_sub(60);
        let top = (&self.mant >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.bits as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Fixed { mant: self.mant.abs(), bits: self.bits }
    }

    /// Changes the scale, truncating toward negative infinity when narrowing.
    pub fn with_bits(&self, bits: u32) -> Self {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => &self.mant >> (self.bits - bits),
        };
        Fixed { mant, bits }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Fixed { mant: &self.mant * k, bits: self.bits }
    }

    /// Truncating division by an integer.
    pub fn div_int(&self, k: &BigInt) -> Self {
        Fixed { mant: &self.mant / k, bits: self.bits }
    }

    /// Scales by `2^e` (exact for `e >= 0`).
    pub fn shl(&self, e: i64) -> Self {
        let mant = if e >= 0 { &self.mant << (e as u64) } else { &self.mant >> ((-e) as u64) };
        Fixed { mant, bits: self.bits }
    }

    /// Truncating quotient. Panics on division by zero.
    pub fn div(&self, rhs: &Fixed) -> Self {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: (&self.mant << self.bits) / &rhs.mant, bits: self.bits }
    }

    pub fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Fixed::one(self.bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Floor square root. Returns `None` for negative input.
    pub fn sqrt(&self) -> Option<Self> {
        if self.mant.is_negative() {
            return None;
        }
        let scaled = self.mant.magnitude() << self.bits;
        Some(Fixed { mant: BigInt::from(scaled.sqrt()), bits: self.bits })
    }

    /// Natural logarithm. Returns `None` for nonpositive input.
    pub fn ln(&self) -> Option<Self> {
        if !self.mant.is_positive() {
            return None;
        }
        let work = self.bits + 32;
        let x = self.with_bits(work);
        // x = m * 2^e with m in [1, 2)
        let e = x.mant.bits() as i64 - 1 - i64::from(work);
        let m = x.shl(-e);
        let one = Fixed::one(work);
        let t = (&m - &one).div(&(&m + &one));
        let ln_m = atanh_series(&t).shl(1);
        let ln2 = ln2(work);
        let total = &ln_m + &ln2.mul_int(&BigInt::from(e));
        Some(total.with_bits(self.bits))
    }

    /// Decimal text with `digits` fractional digits, rounded to nearest.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = &self.mant * BigInt::from(10u32).pow(digits);
        let half = if self.bits == 0 { BigInt::zero() } else { BigInt::one() << (self.bits - 1) };
        let q = (scaled + half) >> self.bits;
        format_scaled(&q, digits)
    }
}

fn atanh_series(t: &Fixed) -> Fixed {
    let bits = t.bits;
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = Fixed::zero(bits);
    let mut j = 1u64;
    while !power.is_zero() {
        sum = &sum + &power.div_int(&BigInt::from(j));
        power = &power * &t2;
        j += 2;
    }
    sum
}

/// ln 2 = 2 atanh(1/3).
pub fn ln2(bits: u32) -> Fixed {
    let third = Fixed::one(bits + 16).div_int(&BigInt::from(3));
    atanh_series(&third).shl(1).with_bits(bits)
}

pub fn euler_gamma(bits: u32) -> Fixed {
    Fixed::from_decimal(EULER_GAMMA_200, bits).expect("constant parses")
}

pub fn pi(bits: u32) -> Fixed {
    Fixed::from_decimal(PI_200, bits).expect("constant parses")
}

/// Formats an integer `q` as `q / 10^digits` in plain decimal notation.
pub fn format_scaled(q: &BigInt, digits: u32) -> String {
    let neg = q.is_negative();
    let mag = q.magnitude().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        mag
    } else if mag.len() > d {
        format!("{}.{}", &mag[..mag.len() - d], &mag[mag.len() - d..])
    } else {
        format!("0.{}{}", "0".repeat(d - mag.len()), mag)
    };
    if neg && q.magnitude().bits() > 0 {
        format!("-{body}")
    } else {
        body
    }
}

/// Parses `[-]digits[.digits][e[-]digits]` exactly.
pub fn parse_decimal_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    })
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.bits, other.bits);
        self.mant.cmp(&other.mant)
    }
}

impl<'a> Add<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant + &rhs.mant, bits: self.bits }
    }
}

impl<'a> Sub<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant - &rhs.mant, bits: self.bits }
    }
}

impl<'a> Mul<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: (&self.mant * &rhs.mant) >> self.bits, bits: self.bits }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { mant: -&self.mant, bits: self.bits }
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.bits as f64) / std::f64::consts::LOG2_10).floor() as u32;
        f.write_str(&self.to_decimal(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: u32 = 400;

    #[test]
    fn decimal_round_trip() {
        let x = Fixed::from_decimal("-12.5e-1", BITS).unwrap();
        assert_eq!(x.to_decimal(3), "-1.250");
        assert_eq!(Fixed::from_decimal("0.000123", BITS).unwrap().to_decimal(6), "0.000123");
        assert!(parse_decimal_ratio("1.2.3").is_none());
        assert!(parse_decimal_ratio("abc").is_none());
        assert_eq!(parse_decimal_ratio("1e6").unwrap(), BigRational::from_integer(1_000_000.into()));
    }

    #[test]
    fn sqrt_two() {
        let two = Fixed::from_int(2, BITS);
        let r = two.sqrt().unwrap();
        assert!(r.to_decimal(55).starts_with("1.41421356237309504880168872420969807856967187537694"));
        assert!(Fixed::from_int(-1, BITS).sqrt().is_none());
    }

    #[test]
    fn ln_matches_known_values() {
        let ln10 = Fixed::from_int(10, BITS).ln().unwrap();
        assert!(ln10.to_decimal(65).starts_with("2.302585092994045684017991454684364207601101488628772976033327"));
        let ln_third =
            Fixed::from_decimal("0.333333333333333333333333333333333333333333333333333333333333333333333", BITS)
                .unwrap()
                .ln()
                .unwrap();
        assert!(ln_third.to_decimal(45).starts_with("-1.098612288668109691395245236922525704647"));
    }

    #[test]
    fn division_and_powers() {
        let a = Fixed::from_int(1, BITS).div(&Fixed::from_int(3, BITS));
        assert_eq!(a.to_decimal(10), "0.3333333333");
        assert_eq!(Fixed::from_int(3, BITS).powi(5).to_decimal(0), "243");
        assert!((a.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn constants_are_consistent() {
        let g = euler_gamma(700);
        assert!(g.to_decimal(25).starts_with("0.57721566490153286060"));
        let p = pi(700);
        assert!((p.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}
