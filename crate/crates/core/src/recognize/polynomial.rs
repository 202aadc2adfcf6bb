use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::RecognizeError;
use crate::precision::Fixed;

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Drops trailing zeros; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self, RecognizeError> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(RecognizeError::Precondition("the zero polynomial has no degree".into()));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, RecognizeError> {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    /// Gcd of the coefficients (positive).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> IntPolynomial {
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn eval_fixed(&self, x: &Fixed) -> Fixed {
        let bits = x.bits();
        self.coeffs.iter().rev().fold(Fixed::zero(bits), |acc, c| &(&acc * x) + &Fixed::from_int(c.clone(), bits))
    }

    fn as_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Whether `self` divides `other` over the rationals.
    pub fn divides(&self, other: &IntPolynomial) -> bool {
        let (_, r) = rational_div_rem(&other.as_rational(), &self.as_rational());
        r.iter().all(Zero::is_zero)
    }

    /// Exact quotient over the rationals, scaled to a primitive integer
    /// polynomial; `None` when the division leaves a remainder.
    pub fn exact_quotient(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let (q, r) = rational_div_rem(&self.as_rational(), &divisor.as_rational());
        if !r.iter().all(Zero::is_zero) {
            return None;
        }
        from_rational(&q).map(|p| p.primitive())
    }

    pub fn derivative(&self) -> Option<IntPolynomial> {
        let d: Vec<BigInt> = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        IntPolynomial::new(d).ok()
    }

    /// Complex roots in double precision (Durand–Kerner).
    pub fn roots_f64(&self) -> Vec<Complex64> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lc = big_to_f64(self.leading());
        let monic: Vec<f64> = self.coeffs.iter().map(|c| big_to_f64(c) / lc).collect();
        let bound = 1.0 + monic[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..d).map(|j| seed.powu(j as u32 + 1) * bound.min(1e150)).collect();
        let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        for _ in 0..5000 {
            let mut moved = 0.0f64;
            for j in 0..d {
                let denom =
                    (0..d).filter(|&i| i != j).fold(Complex64::new(1.0, 0.0), |acc, i| acc * (roots[j] - roots[i]));
                if denom.norm() == 0.0 {
                    roots[j] += Complex64::new(1e-8, 1e-8) * bound;
                    moved = f64::INFINITY;
                    continue;
                }
                let delta = eval(roots[j]) / denom;
                roots[j] -= delta;
                moved = moved.max(delta.norm() / roots[j].norm().max(1.0));
            }
            if moved < 1e-15 {
                break;
            }
        }
        roots
    }

    /// Complex roots polished by Newton's method at `bits` binary digits.
    pub fn roots(&self, bits: u32) -> Vec<ComplexFixed> {
        let df = match self.derivative() {
            Some(df) => df,
            None => return Vec::new(),
        };
        self.roots_f64()
            .into_iter()
            .map(|z0| {
                let mut z = ComplexFixed::from_c64(z0, bits);
                for _ in 0..200 {
                    let fz = z.eval(&self.coeffs);
                    let dz = z.eval(&df.coeffs);
                    let Some(step) = fz.div(&dz) else { break };
                    z = z.sub(&step);
                    if step.max_abs_mantissa_bits() <= 16 {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// No factorization into integer polynomials of positive degree.
    ///
    /// Repeated roots are detected exactly; otherwise every set of at most
    /// half the roots is multiplied out, rounded and tried as a divisor.
    pub fn is_irreducible(&self) -> bool {
        let d = self.degree();
        if d <= 1 {
            return d == 1;
        }
        let df = self.derivative().unwrap();
        if rational_gcd_degree(&self.as_rational(), &df.as_rational()) > 0 {
            return false;
        }
        let bits = self.working_bits();
        let roots = self.roots(bits);
        let lc = Fixed::from_int(self.leading().clone(), bits);
        for size in 1..=d / 2 {
            for subset in subsets(d, size) {
                let mut prod = vec![ComplexFixed { re: lc.clone(), im: Fixed::zero(bits) }];
                for &i in &subset {
                    prod = multiply_linear(&prod, &roots[i]);
                }
                let mut coeffs = Vec::with_capacity(prod.len());
                let mut integral = true;
                for c in &prod {
                    let (re, re_err) = nearest_int(&c.re);
                    let (im, _) = nearest_int(&c.im);
                    if !im.is_zero() || re_err > 0.25 {
                        integral = false;
                        break;
                    }
                    coeffs.push(re);
                }
                if !integral {
                    continue;
                }
                if let Ok(g) = IntPolynomial::new(coeffs) {
                    if g.degree() == size && g.divides(self) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Rational roots, found by rounding `lc · (x - r)` at each complex
    /// root `r` and keeping exact linear divisors.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let bits = self.working_bits();
        let lc = Fixed::from_int(self.leading().clone(), bits);
        let mut out: Vec<BigRational> = Vec::new();
        for r in self.roots(bits) {
            let (im, _) = nearest_int(&(&lc * &r.im));
            if !im.is_zero() {
                continue;
            }
            let (c0, _) = nearest_int(&-&(&lc * &r.re));
            let root = BigRational::new(-c0, self.leading().clone());
            if self.eval_rational(&root).is_zero() && !out.contains(&root) {
                out.push(root);
            }
        }
        out.sort();
        out
    }

    /// Precision at which products of roots scaled by the leading
    /// coefficient can be rounded reliably.
    fn working_bits(&self) -> u32 {
        let d = self.degree();
        let bound = 1.0
            + self.coeffs[..d].iter().fold(0.0f64, |m, c| m.max(big_to_f64(c).abs()))
                / big_to_f64(self.leading()).abs();
        96 + self.leading().bits() as u32 + (d as u32) * (bound.log2().max(0.0) as u32 + 2)
    }

    /// Text with variable `var`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                out.push_str(&mag.to_string());
            }
            match i {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl Serialize for IntPolynomial {
    /// Ascending coefficients as decimal strings.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::MIN } else { f64::MAX })
}

fn from_rational(coeffs: &[BigRational]) -> Option<IntPolynomial> {
    let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    IntPolynomial::new(ints).ok()
}

/// Long division of ascending coefficient vectors.
pub(crate) fn rational_div_rem(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut den = den.to_vec();
    while den.last().is_some_and(Zero::is_zero) {
        den.pop();
    }
    assert!(!den.is_empty(), "division by the zero polynomial");
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dd] / &den[dd];
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] = &rem[i + j] - &c * dj;
        }
        quot[i] = c;
    }
    rem.truncate(dd);
    (quot, rem)
}

fn rational_gcd_degree(a: &[BigRational], b: &[BigRational]) -> usize {
    let trim = |mut v: Vec<BigRational>| {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = rational_div_rem(&a, &b);
        a = b;
        b = trim(r);
    }
    a.len().saturating_sub(1)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Nearest integer and the distance to it (as a double).
fn nearest_int(x: &Fixed) -> (BigInt, f64) {
    let half = Fixed::from_ratio(&BigRational::new(1.into(), 2.into()), x.bits());
    let shifted = x + &half;
    let n = shifted.mantissa() >> x.bits();
    let err = (x - &Fixed::from_int(n.clone(), x.bits())).to_f64().abs();
    (n, err)
}

/// Complex number with fixed-point parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFixed {
    pub re: Fixed,
    pub im: Fixed,
}

impl ComplexFixed {
    fn from_c64(z: Complex64, bits: u32) -> Self {
        ComplexFixed {
            re: Fixed::from_f64(z.re, bits).unwrap_or_else(|| Fixed::zero(bits)),
            im: Fixed::from_f64(z.im, bits).unwrap_or_else(|| Fixed::zero(bits)),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        ComplexFixed { re: &(&self.re * &o.re) - &(&self.im * &o.im), im: &(&self.re * &o.im) + &(&self.im * &o.re) }
    }

    fn sub(&self, o: &Self) -> Self {
        ComplexFixed { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn div(&self, o: &Self) -> Option<Self> {
        let n = &(&o.re * &o.re) + &(&o.im * &o.im);
        if n.is_zero() {
            return None;
        }
        let re = &(&self.re * &o.re) + &(&self.im * &o.im);
        let im = &(&self.im * &o.re) - &(&self.re * &o.im);
        Some(ComplexFixed { re: re.div(&n), im: im.div(&n) })
    }

    fn eval(&self, coeffs: &[BigInt]) -> Self {
        let bits = self.re.bits();
        coeffs.iter().rev().fold(ComplexFixed { re: Fixed::zero(bits), im: Fixed::zero(bits) }, |acc, c| {
            let prod = acc.mul(self);
            ComplexFixed { re: &prod.re + &Fixed::from_int(c.clone(), bits), im: prod.im }
        })
    }

    fn max_abs_mantissa_bits(&self) -> u64 {
        self.re.mantissa().bits().max(self.im.mantissa().bits())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `poly · (x - r)`, coefficients ascending.
fn multiply_linear(poly: &[ComplexFixed], r: &ComplexFixed) -> Vec<ComplexFixed> {
    let bits = r.re.bits();
    let zero = ComplexFixed { re: Fixed::zero(bits), im: Fixed::zero(bits) };
    let mut out = vec![zero; poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        // c x^i (x - r) = c x^{i+1} - c r x^i
        out[i + 1] = ComplexFixed { re: &out[i + 1].re + &c.re, im: &out[i + 1].im + &c.im };
        let cr = c.mul(r);
        out[i] = out[i].sub(&cr);
    }
    out
}
