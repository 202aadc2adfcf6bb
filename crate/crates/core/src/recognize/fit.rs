//! Exact integer-polynomial fits to `(x, y)` data, with a search for points
//! whose value lost a common factor.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::minpoly::log10_abs;
use super::polynomial::IntPolynomial;
use super::RecognizeError;

/// Points beyond the interpolation set that must be matched exactly.
pub const MIN_HOLDOUT: usize = 2;

pub type Point = (BigInt, BigInt);

/// Per-point growth summary, for spotting values that lost a factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub x: String,
    pub log10_y: f64,
    pub log10_multiplier: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    #[serde(rename = "coeffs")]
    pub polynomial: IntPolynomial,
    /// Number of leading points the polynomial interpolates.
    pub points_used: usize,
    /// `P(x) - m·y` on the remaining points; all zero for an accepted fit.
    #[serde(serialize_with = "as_strings")]
    pub holdout_residuals: Vec<BigInt>,
    pub multipliers: Vec<u64>,
    pub holdout_ok: bool,
    pub growth: Vec<GrowthRow>,
}

fn as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Coefficients (ascending) of the polynomial through `pts`, by Newton
/// divided differences.
fn interpolate(pts: &[Point]) -> Vec<BigRational> {
    let n = pts.len();
    let xs: Vec<BigRational> = pts.iter().map(|(x, _)| BigRational::from_integer(x.clone())).collect();
    let mut dd: Vec<BigRational> = pts.iter().map(|(_, y)| BigRational::from_integer(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // expand the Newton form from the innermost term outwards
    let mut coeffs = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs = coeffs·(x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); n];
        for j in 0..n {
            if coeffs[j].is_zero() {
                continue;
            }
            if j + 1 < n {
                next[j + 1] = &next[j + 1] + &coeffs[j];
            }
            next[j] = &next[j] - &coeffs[j] * &xs[i];
        }
        next[0] = &next[0] + &dd[i];
        coeffs = next;
    }
    coeffs
}

fn check_points(points: &[Point]) -> Result<(), RecognizeError> {
    for (i, (x, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(x2, _)| x2 == x) {
            return Err(RecognizeError::Precondition(format!("x = {x} appears twice")));
        }
    }
    if points.iter().all(|(_, y)| y.is_zero()) {
        return Err(RecognizeError::Precondition("all y values are zero".into()));
    }
    Ok(())
}

fn growth(points: &[Point], multipliers: &[u64]) -> Vec<GrowthRow> {
    points
        .iter()
        .zip(multipliers)
        .map(|((x, y), &m)| GrowthRow { x: x.to_string(), log10_y: log10_abs(y), log10_multiplier: (m as f64).log10() })
        .collect()
}

/// Lowest-degree integer polynomial through all points: interpolate the
/// first `d + 1`, accept when the coefficients are integers and the other
/// points (at least [`MIN_HOLDOUT`]) match exactly.
pub fn fit_int_poly(points: &[Point], max_degree: usize) -> Result<FitReport, RecognizeError> {
    check_points(points)?;
    for d in 0..=max_degree {
        let needed = d + 1 + MIN_HOLDOUT;
        if points.len() < needed {
            return Err(RecognizeError::InsufficientPoints { degree: d, needed, have: points.len() });
        }
        let coeffs = interpolate(&points[..=d]);
        if !coeffs.iter().all(|c| c.is_integer()) {
            continue;
        }
        let Ok(poly) = IntPolynomial::new(coeffs.iter().map(|c| c.to_integer()).collect()) else { continue };
        let residuals: Vec<BigInt> = points[d + 1..].iter().map(|(x, y)| poly.eval_int(x) - y).collect();
        if residuals.iter().all(Zero::is_zero) {
            let multipliers = vec![1; points.len()];
            return Ok(FitReport {
                polynomial: poly,
                points_used: d + 1,
                holdout_residuals: residuals,
                growth: growth(points, &multipliers),
                multipliers,
                holdout_ok: true,
            });
        }
    }
    Err(RecognizeError::NoIntegerFit { max_degree })
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Like [`fit_int_poly`], but lets up to two points carry an integer
/// multiplier in `[1, max_multiplier]`, or all points share one. Among
/// repairs of the fewest points, the smallest multipliers win.
pub fn rescale_scan(points: &[Point], max_multiplier: u64, max_degree: usize) -> Result<FitReport, RecognizeError> {
    if max_multiplier == 0 {
        return Err(RecognizeError::Precondition("max_multiplier must be at least 1".into()));
    }
    check_points(points)?;
    if let Ok(report) = fit_int_poly(points, max_degree) {
        return Ok(report);
    }
    let n = points.len();
    for repaired in 1..=2usize {
        let mut best: Option<(Vec<u64>, FitReport)> = None;
        for subset in index_subsets(n, repaired) {
            let rest: Vec<Point> = (0..n).filter(|i| !subset.contains(i)).map(|i| points[i].clone()).collect();
            let Ok(base) = fit_int_poly(&rest, max_degree) else { continue };
            let mut multipliers = vec![1u64; n];
            let ok = subset.iter().all(|&i| {
                let (x, y) = &points[i];
                let target = base.polynomial.eval_int(x);
                if y.is_zero() || !target.is_multiple_of(y) {
                    return false;
                }
                match (target / y).to_u64() {
                    Some(m) if (1..=max_multiplier).contains(&m) => {
                        multipliers[i] = m;
                        true
                    }
                    _ => false,
                }
            });
            if !ok {
                continue;
            }
            let mut key: Vec<u64> = subset.iter().map(|&i| multipliers[i]).collect();
            key.sort_unstable_by(|a, b| b.cmp(a));
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                let residuals = (0..n)
                    .skip(base.points_used)
                    .map(|i| base.polynomial.eval_int(&points[i].0) - &points[i].1 * BigInt::from(multipliers[i]))
                    .collect();
                let report = FitReport {
                    polynomial: base.polynomial.clone(),
                    points_used: base.points_used,
                    holdout_residuals: residuals,
                    growth: growth(points, &multipliers),
                    multipliers,
                    holdout_ok: true,
                };
                best = Some((key, report));
            }
        }
        if let Some((_, report)) = best {
            return Ok(report);
        }
    }
    for m in 2..=max_multiplier {
        let scaled: Vec<Point> = points.iter().map(|(x, y)| (x.clone(), y * BigInt::from(m))).collect();
        if let Ok(mut report) = fit_int_poly(&scaled, max_degree) {
            report.multipliers = vec![m; n];
            report.growth = growth(points, &report.multipliers);
            return Ok(report);
        }
    }
    Err(RecognizeError::NoRescaledFit { max_multiplier, max_degree })
}

/// Reads `x,y` rows of arbitrary-size integers, skipping `#` lines.
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<Point>, RecognizeError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(RecognizeError::Format(format!("expected header x,y, found {headers:?}")));
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let parse = |i: usize| {
            record[i].parse::<BigInt>().map_err(|_| RecognizeError::Format(format!("bad integer {:?}", &record[i])))
        };
        out.push((parse(0)?, parse(1)?));
    }
    Ok(out)
}

pub fn write_points_csv<W: Write>(points: &[Point], out: W) -> Result<(), RecognizeError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Integer points `(x, P(x))`.
pub fn sample_points(poly: &IntPolynomial, xs: impl IntoIterator<Item = i64>) -> Vec<Point> {
    xs.into_iter().map(|x| (BigInt::from(x), poly.eval_int(&BigInt::from(x)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| (x.into(), y.into())).collect()
    }

    fn twelve_cubed_nine() -> IntPolynomial {
        // 12 (x - 1)^9
        let binom = [1i64, 9, 36, 84, 126, 126, 84, 36, 9, 1];
        let coeffs: Vec<i64> =
            binom.iter().enumerate().map(|(i, b)| 12 * b * if (9 - i) % 2 == 0 { 1 } else { -1 }).collect();
        IntPolynomial::from_i64(&coeffs).unwrap()
    }

    #[test]
    fn interpolation_is_exact() {
        let p = IntPolynomial::from_i64(&[5, -3, 0, 2]).unwrap();
        let data = sample_points(&p, [1, 2, 4, 7, 8, 11]);
        let r = fit_int_poly(&data, 6).unwrap();
        assert_eq!(r.polynomial, p);
        assert_eq!(r.points_used, 4);
        assert!(r.holdout_ok && r.holdout_residuals.iter().all(Zero::is_zero));
        assert_eq!(r.multipliers, vec![1; 6]);
    }

    #[test]
    fn needs_holdout_points() {
        assert!(matches!(fit_int_poly(&pts(&[(1, 2), (3, 4)]), 5), Err(RecognizeError::InsufficientPoints { .. })));
        // a cubic through 5 points cannot be verified at degree 3
        let p = IntPolynomial::from_i64(&[0, 0, 0, 1]).unwrap();
        assert!(fit_int_poly(&sample_points(&p, [1, 2, 3, 4, 5]), 5).is_err());
        assert!(fit_int_poly(&pts(&[(1, 2), (1, 3), (2, 2)]), 1).is_err());
    }

    #[test]
    fn non_integer_data_is_rejected() {
        // y = x(x+1)/2 has half-integer coefficients
        let data = pts(&[(1, 1), (2, 3), (3, 6), (4, 10), (5, 15), (6, 21)]);
        assert!(matches!(fit_int_poly(&data, 3), Err(RecognizeError::NoIntegerFit { .. })));
        let repaired = rescale_scan(&data, 4, 3).unwrap();
        assert_eq!(repaired.multipliers, vec![2; 6]);
        assert_eq!(repaired.polynomial, IntPolynomial::from_i64(&[0, 1, 1]).unwrap());
    }

    #[test]
    fn scan_repairs_divided_point() {
        let p = twelve_cubed_nine();
        let mut data = sample_points(&p, [3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29]);
        data[4].1 = &data[4].1 / 3;
        let r = rescale_scan(&data, 30, 10).unwrap();
        assert_eq!(r.polynomial, p);
        assert_eq!(r.multipliers[4], 3);
        assert_eq!(r.multipliers.iter().filter(|&&m| m != 1).count(), 1);
        assert!((r.growth[4].log10_multiplier - 3f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn consistent_points_match_plain_fit() {
        let data = sample_points(&twelve_cubed_nine(), 2..14);
        assert_eq!(rescale_scan(&data, 10, 10).unwrap(), fit_int_poly(&data, 10).unwrap());
    }

    #[test]
    fn csv_round_trip() {
        let data = pts(&[(3, 6144), (5, 3145728)]);
        let mut buf = Vec::new();
        write_points_csv(&data, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x,y\n3,6144\n5,3145728\n");
        assert_eq!(read_points_csv(&buf[..]).unwrap(), data);
        assert!(read_points_csv(&b"a,b\n1,2\n"[..]).is_err());
    }
}
