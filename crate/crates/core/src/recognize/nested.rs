//! Nested-radical forms of roots of quartics that split over `Q(√D)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::polynomial::IntPolynomial;
use super::RecognizeError;
use crate::closedform::{square_split, RadicalValue};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Exact square root of a nonnegative rational, if it has one.
fn rational_sqrt(t: &BigRational) -> Option<BigRational> {
    if t.is_negative() {
        return None;
    }
    let (n, d) = (t.numer(), t.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Roots of `y^2 + u y + v` with `u = α ± β√D`, `v = γ ± δ√D`.
struct ConjugatePair {
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
    delta: BigRational,
}

impl ConjugatePair {
    /// The four roots `(-α ∓ β√D ± √(E ± F√D)) / 2`, real ones only.
    fn real_roots(&self, d: &BigInt) -> Vec<RadicalValue> {
        let dr = rat(d.clone());
        let e = &self.alpha * &self.alpha + &self.beta * &self.beta * &dr - &self.gamma * rat(4);
        let f = &self.alpha * &self.beta * rat(2) - &self.delta * rat(4);
        let half = BigRational::new(1.into(), 2.into());
        let a = -&self.alpha * &half;
        let mut out = Vec::new();
        for conj in [1i32, -1] {
            let b = -&self.beta * &half * rat(conj);
            let f = &f * rat(conj);
            for sign in [1i32, -1] {
                let c = &half * rat(sign);
                if let Ok(v) = RadicalValue::from_rational_parts(&a, &b, d, &c, &e, &f) {
                    if v.inner_radicand_nonnegative() {
                        out.push(v);
                    }
                }
            }
        }
        out
    }
}

fn closest(candidates: Vec<RadicalValue>, target: f64) -> Result<RadicalValue, RecognizeError> {
    candidates
        .into_iter()
        .filter_map(|v| v.to_f64().ok().map(|x| ((x - target).abs(), v)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, v)| v)
        .ok_or(RecognizeError::NonRealBranch)
}

/// Writes the real root of `poly` nearest `target` as
/// `(A + B√D + C√(E + F√D)) / G`.
///
/// Quartics are split into conjugate quadratic factors over `Q(√D)`;
/// quadratics use the quadratic formula and must have discriminant in
/// `Q(√D)`.
pub fn quartic_to_nested_radical(
    poly: &IntPolynomial,
    d: &BigInt,
    target: f64,
) -> Result<RadicalValue, RecognizeError> {
    if !d.is_positive() || square_split(d).0 != BigInt::one() {
        return Err(RecognizeError::Precondition(format!("D = {d} must be a positive square-free integer")));
    }
    let c = poly.coeffs();
    match poly.degree() {
        1 => Ok(RadicalValue::rational(&BigRational::new(-c[0].clone(), c[1].clone()))),
        2 => {
            let disc = &c[1] * &c[1] - BigInt::from(4) * &c[0] * &c[2];
            if disc.is_negative() {
                return Err(RecognizeError::NonRealBranch);
            }
            let free = square_split(&disc).1;
            if !free.is_one() && free != *d {
                return Err(RecognizeError::NoFactorization(format!("discriminant {disc} does not lie in Q(√{d})")));
            }
            let roots = [1, -1]
                .into_iter()
                .filter_map(|s| {
                    RadicalValue::new(
                        -c[1].clone(),
                        BigInt::from(s),
                        disc.clone(),
                        BigInt::zero(),
                        BigInt::zero(),
                        BigInt::zero(),
                        &c[2] * 2,
                    )
                    .ok()
                })
                .collect();
            closest(roots, target)
        }
        4 => quartic(poly, d, target),
        deg => Err(RecognizeError::Precondition(format!("expected degree 2 or 4, got {deg}"))),
    }
}

fn quartic(poly: &IntPolynomial, d: &BigInt, target: f64) -> Result<RadicalValue, RecognizeError> {
    let lc = rat(poly.leading().clone());
    let a: Vec<BigRational> = poly.coeffs().iter().map(|x| rat(x.clone()) / &lc).collect();
    let dr = rat(d.clone());
    let two = rat(2);
    let alpha = &a[3] / &two;
    // γ = g0 + g1 t and βδD = h0 + h1 t, where t = β²
    let g0 = (&a[2] - &alpha * &alpha) / &two;
    let g1 = &dr / &two;
    let h0 = &alpha * &g0 - &a[1] / &two;
    let h1 = &alpha * &g1;

    let mut pairs = Vec::new();
    if h0.is_zero() {
        // β = 0: both factors share u = α
        if let Some(delta) = rational_sqrt(&((&g0 * &g0 - &a[0]) / &dr)) {
            pairs.push(ConjugatePair { alpha: alpha.clone(), beta: BigRational::zero(), gamma: g0.clone(), delta });
        }
    }
    // t D (γ² - a0) = (βδD)²
    let cubic = [
        -(&h0 * &h0),
        &dr * (&g0 * &g0 - &a[0]) - &two * &h0 * &h1,
        &two * &dr * &g0 * &g1 - &h1 * &h1,
        &dr * &g1 * &g1,
    ];
    let den = cubic.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = cubic.iter().map(|x| (x * rat(den.clone())).to_integer()).collect();
    let cubic = IntPolynomial::new(ints)?;
    for t in cubic.rational_roots().into_iter().filter(|t| t.is_positive()) {
        let Some(beta) = rational_sqrt(&t) else { continue };
        let gamma = &g0 + &g1 * &t;
        let delta = (&h0 + &h1 * &t) / (&beta * &dr);
        pairs.push(ConjugatePair { alpha: alpha.clone(), beta, gamma, delta });
    }

    let mut roots = Vec::new();
    for pr in pairs {
        let checks = [
            &pr.alpha * &two - &a[3],
            &pr.gamma * &two + &pr.alpha * &pr.alpha - &pr.beta * &pr.beta * &dr - &a[2],
            (&pr.alpha * &pr.gamma - &pr.beta * &pr.delta * &dr) * &two - &a[1],
            &pr.gamma * &pr.gamma - &pr.delta * &pr.delta * &dr - &a[0],
        ];
        if checks.iter().all(Zero::is_zero) {
            roots.extend(pr.real_roots(d));
        }
    }
    if roots.is_empty() {
        return Err(RecognizeError::NoFactorization(format!(
            "{} does not split into conjugate quadratics over Q(√{d}) with a real root",
            poly.render("y")
        )));
    }
    closest(roots, target)
}

/// Decimal rendering of a radical form, accurate to `digits - 2` places.
pub fn eval_radical_form(form: &RadicalValue, digits: u32) -> Result<String, RecognizeError> {
    Ok(form.to_decimal(digits)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn reference_quartic_round_trip() {
        let quartic = poly(&[243, -25074, 432960, -2852864, 3145728]);
        let v = quartic_to_nested_radical(&quartic, &BigInt::from(217), 0.7339845694).unwrap();
        let expected = RadicalValue::from_integers([1393, 61, 217, 1, 2416130, 169946, 6144]).unwrap();
        assert_eq!(v, expected);
        assert!(matches!(
            quartic_to_nested_radical(&quartic, &BigInt::from(10), 0.73),
            Err(RecognizeError::NoFactorization(_))
        ));
    }

    #[test]
    fn quadratic_path() {
        let v = quartic_to_nested_radical(&poly(&[2, -49, 128]), &BigInt::from(17), 0.34).unwrap();
        assert_eq!(v, RadicalValue::from_integers([49, 9, 17, 0, 0, 0, 256]).unwrap());
        let w = quartic_to_nested_radical(&poly(&[2, -49, 128]), &BigInt::from(17), 0.04).unwrap();
        assert_eq!(w, RadicalValue::from_integers([49, -9, 17, 0, 0, 0, 256]).unwrap());
        assert!(quartic_to_nested_radical(&poly(&[2, -49, 128]), &BigInt::from(13), 0.3).is_err());
        assert!(matches!(
            quartic_to_nested_radical(&poly(&[1, 0, 1]), &BigInt::from(2), 0.0),
            Err(RecognizeError::NonRealBranch)
        ));
    }

    #[test]
    fn biquadratic_with_zero_beta() {
        // roots ±√(2 ± √3): y^4 - 4y^2 + 1
        let v = quartic_to_nested_radical(&poly(&[1, 0, -4, 0, 1]), &BigInt::from(3), 1.93).unwrap();
        let x = v.to_f64().unwrap();
        assert!((x - (2.0 + 3f64.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn evaluation() {
        let seven = RadicalValue::rational(&rat(7));
        assert_eq!(eval_radical_form(&seven, 5).unwrap(), "7.00000");
        let v = RadicalValue::from_integers([1393, 61, 217, 1, 2416130, 169946, 6144]).unwrap();
        assert!(eval_radical_form(&v, 30).unwrap().starts_with("0.73398456938"));
    }
}
