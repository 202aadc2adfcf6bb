//! Gumbel-type laws for `M_n` and the expected maxima they imply.
//!
//! For an ℓ-block schedule (ℓ = 1, 2, 3)
//!
//! ```text
//! P{M_n ≤ m} ≈ exp(-(χ_ℓ / 2ℓ) · n · (p/q)^{2m})
//! ```
//!
//! and the mean of the corresponding continuous law gives
//! `E_ℓ = (ln n + γ + ln(χ_ℓ / 2ℓ)) / ln(q²/p²) + 1/2`. Random lights
//! (ℓ = 0 here) behave like a lazy walk with `E_0 = (ln(n/2) + γ + ln χ_0) /
//! ln(q/p) + 1/2`. The small periodic corrections of the discrete maximum
//! are not modelled.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::chi::{chi_closed, chi_f64};
use super::{ClosedFormError, PredictionTable};
use crate::precision::{bits_for_digits, euler_gamma, Fixed};

/// Rows are produced until the CDF exceeds `1 - GUMBEL_TAIL`.
pub const GUMBEL_TAIL: f64 = 1e-12;

/// Euler's constant in double precision.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn check(ell: u32, p: f64, n: u64, ells: std::ops::RangeInclusive<u32>) -> Result<(), ClosedFormError> {
    if !ells.contains(&ell) {
        return Err(ClosedFormError::UnsupportedEll(ell));
    }
    if !(p > 0.0 && p < 0.5) {
        return Err(ClosedFormError::ProbabilityRange(p.to_string()));
    }
    if n < 2 {
        return Err(ClosedFormError::RunLength(n));
    }
    Ok(())
}

/// `P{M_n ≤ m}` under the Gumbel-type law.
pub fn gumbel_cdf(ell: u32, p: f64, n: u64, m: i64) -> Result<f64, ClosedFormError> {
    check(ell, p, n, 1..=3)?;
    let scale = chi_f64(ell, p)? / (2.0 * f64::from(ell));
    let log_rate = (n as f64).ln() + 2.0 * m as f64 * (p / (1.0 - p)).ln();
    Ok((-scale * log_rate.exp()).exp())
}

/// Gumbel pmf from `m = 0` up to the first level whose CDF exceeds
/// `1 - GUMBEL_TAIL`.
pub fn gumbel_pmf(ell: u32, p: f64, n: u64) -> Result<PredictionTable, ClosedFormError> {
    check(ell, p, n, 1..=3)?;
    let mut cdf = Vec::new();
    for m in 0i64.. {
        let c = gumbel_cdf(ell, p, n, m)?;
        cdf.push(c);
        if c > 1.0 - GUMBEL_TAIL {
            break;
        }
    }
    let mut table = PredictionTable::from_cdf(Some(ell), p, n, cdf);
    table.tail_tolerance = GUMBEL_TAIL;
    Ok(table)
}

/// Approximate `E(M_n)`; `ell = 0` is the random-lights walk.
pub fn expected_max(ell: u32, p: f64, n: u64) -> Result<f64, ClosedFormError> {
    check(ell, p, n, 0..=3)?;
    let q = 1.0 - p;
    let chi = chi_f64(ell, p)?;
    Ok(if ell == 0 {
        let base = (q / p).ln();
        (n as f64 / 2.0).ln() / base + (EULER_GAMMA + chi.ln()) / base + 0.5
    } else {
        let base = (q * q / (p * p)).ln();
        (n as f64).ln() / base + (EULER_GAMMA + (chi / (2.0 * f64::from(ell))).ln()) / base + 0.5
    })
}

/// [`expected_max`] evaluated in fixed point from the exact `χ_ℓ`, rendered
/// with `digits` fractional digits.
pub fn expected_max_decimal(ell: u32, p: &BigRational, n: u64, digits: u32) -> Result<String, ClosedFormError> {
    let half = BigRational::new(1.into(), 2.into());
    if *p >= half {
        return Err(ClosedFormError::ProbabilityRange(p.to_string()));
    }
    check(ell, 0.25, n, 0..=3)?;
    let bits = bits_for_digits(digits + 10);
    let ln = |x: &Fixed| x.ln().ok_or_else(|| ClosedFormError::ProbabilityRange(p.to_string()));
    let q = BigRational::one() - p;
    let chi = chi_closed(ell, p)?.to_fixed(bits)?;
    let gamma = euler_gamma(bits);
    let odds = Fixed::from_ratio(&(&q / p), bits);
    let value = if ell == 0 {
        let base = ln(&odds)?;
        let log_n = ln(&Fixed::from_ratio(&BigRational::new(BigInt::from(n), BigInt::from(2)), bits))?;
        let numer = &(&log_n + &gamma) + &ln(&chi)?;
        &numer.div(&base) + &Fixed::from_ratio(&half, bits)
    } else {
        let base = ln(&odds)?.shl(1);
        let log_n = ln(&Fixed::from_int(n, bits))?;
        let scaled = chi.div_int(&BigInt::from(2 * ell));
        let numer = &(&log_n + &gamma) + &ln(&scaled)?;
        &numer.div(&base) + &Fixed::from_ratio(&half, bits)
    };
    Ok(value.to_decimal(digits))
}

/// Approximate `V(M_n)` for ℓ = 1 (the only case with a known law).
pub fn variance_max(ell: u32, p: f64) -> Result<f64, ClosedFormError> {
    if ell != 1 {
        return Err(ClosedFormError::UnsupportedEll(ell));
    }
    check(1, p, 2, 1..=1)?;
    let base = ((1.0 - p) * (1.0 - p) / (p * p)).ln();
    Ok(std::f64::consts::PI.powi(2) / (6.0 * base * base) + 1.0 / 12.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrategyRow {
    pub p: f64,
    /// `E_0 … E_3` in order.
    pub expected: [f64; 4],
}

/// Expected maxima for every light strategy over a grid of `p`.
pub fn strategy_table(p_grid: &[f64], n: u64) -> Result<Vec<StrategyRow>, ClosedFormError> {
    p_grid
        .iter()
        .map(|&p| {
            let mut expected = [0.0; 4];
            for (ell, slot) in expected.iter_mut().enumerate() {
                *slot = expected_max(ell as u32, p, n)?;
            }
            Ok(StrategyRow { p, expected })
        })
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// `p,E0,E1,E2,E3` rows.
pub fn write_strategy_csv<W: Write>(rows: &[StrategyRow], out: W) -> Result<(), ClosedFormError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "E0", "E1", "E2", "E3"])?;
    for r in rows {
        let mut rec = vec![r.p.to_string()];
        rec.extend(r.expected.iter().map(f64::to_string));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_strategy_csv<R: Read>(input: R) -> Result<Vec<StrategyRow>, ClosedFormError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["p", "E0", "E1", "E2", "E3"] {
        return Err(ClosedFormError::Format(format!("expected header p,E0,E1,E2,E3, found {headers:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|_| ClosedFormError::Format(format!("bad number {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != 5 {
                return Err(ClosedFormError::Format("expected 5 columns".into()));
            }
            Ok(StrategyRow { p: vals[0], expected: [vals[1], vals[2], vals[3], vals[4]] })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_values() {
        let v = gumbel_cdf(1, 1.0 / 3.0, 1_000_000, 10).unwrap();
        let expected = (-(1.0 / 16.0) * 1e6 / 4f64.powi(10)).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.9421369).abs() < 1e-6);
        assert!(gumbel_cdf(2, 0.3, 1000, 200).unwrap() == 1.0);
        assert!(gumbel_cdf(0, 0.3, 1000, 2).is_err());
        assert!(gumbel_cdf(1, 0.3, 1, 2).is_err());
    }

    #[test]
    fn cdf_is_monotone_in_m() {
        for ell in 1..=3 {
            let mut prev = 0.0;
            for m in -5..40 {
                let c = gumbel_cdf(ell, 0.3, 100_000, m).unwrap();
                assert!(c >= prev);
                prev = c;
            }
        }
    }

    #[test]
    fn pmf_sums_to_one_and_reproduces_cdf() {
        for ell in 1..=3 {
            let t = gumbel_pmf(ell, 1.0 / 3.0, 1_000_000).unwrap();
            assert!((t.total_mass() - 1.0).abs() <= 1e-12);
            let mut acc = 0.0;
            for row in &t.rows {
                acc += row.pmf;
                assert!(row.pmf >= 0.0);
                assert!((acc - row.cdf).abs() < 1e-14);
                assert_eq!(row.cdf, gumbel_cdf(ell, 1.0 / 3.0, 1_000_000, row.m as i64).unwrap());
            }
        }
    }

    #[test]
    fn mode_sits_near_the_location() {
        for (ell, p, n) in [(1, 1.0 / 3.0, 100_000u64), (2, 0.2, 10_000_000), (3, 0.35, 1_000_000)] {
            let t = gumbel_pmf(ell, p, n).unwrap();
            let base = ((1.0 - p) / p).powi(2).ln();
            let loc = ((n as f64) * chi_f64(ell, p).unwrap() / (2.0 * ell as f64)).ln() / base;
            let mode = t.mode().unwrap() as f64;
            assert!((mode - loc.round()).abs() <= 1.0, "mode {mode} loc {loc}");
        }
    }

    #[test]
    fn expected_maxima_at_one_third() {
        let n = 10_000_000_000u64;
        let e: Vec<f64> = (0..4).map(|ell| expected_max(ell, 1.0 / 3.0, n).unwrap()).collect();
        assert!((e[0] - 29.96706).abs() < 1e-4);
        assert!((e[1] - 15.52601).abs() < 1e-4);
        assert!((e[2] - 15.7401).abs() < 1e-4);
        assert!((e[3] - 16.0104).abs() < 1e-4);
    }

    #[test]
    fn high_precision_expected_max_agrees() {
        let p = BigRational::new(1.into(), 3.into());
        for ell in 0..4 {
            let text = expected_max_decimal(ell, &p, 10_000_000_000, 40).unwrap();
            let hp: f64 = text.parse().unwrap();
            assert!((hp - expected_max(ell, 1.0 / 3.0, 10_000_000_000).unwrap()).abs() < 1e-12);
        }
        // E_1 = log_4(1e10) + (γ + ln(1/16))/ln 4 + 1/2
        let e1 = expected_max_decimal(1, &p, 10_000_000_000, 30).unwrap();
        assert!(e1.starts_with("15.52601356307"), "{e1}");
    }

    #[test]
    fn variance_for_one_block() {
        let v = variance_max(1, 1.0 / 3.0).unwrap();
        let expected = std::f64::consts::PI.powi(2) / 6.0 / 4f64.ln().powi(2) + 1.0 / 12.0;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.939262).abs() < 1e-6);
        assert!(variance_max(2, 0.3).is_err());
        let grid = linspace(0.05, 0.49, 30);
        for w in grid.windows(2) {
            assert!(variance_max(1, w[0]).unwrap() < variance_max(1, w[1]).unwrap());
        }
        assert!(variance_max(1, 0.4999999).unwrap() > 1e10);
    }

    #[test]
    fn strategy_csv_round_trip() {
        let rows = strategy_table(&linspace(0.15, 0.41, 5), 10_000_000_000).unwrap();
        let mut buf = Vec::new();
        write_strategy_csv(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"p,E0,E1,E2,E3\n"));
        assert_eq!(read_strategy_csv(&buf[..]).unwrap(), rows);
    }
}
