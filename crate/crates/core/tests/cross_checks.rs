use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use tlqueue_core::closedform::{chi3_integer_shape, chi_closed, chi_f64};
use tlqueue_core::recognize::{fit_int_poly, minimal_polynomial, quartic_to_nested_radical, Point};
use tlqueue_core::simulate::{compare_distributions, monte_carlo, Engine, MonteCarloConfig};
use tlqueue_core::spectral::{chi_spectral, exact_max_cdf, exact_max_pmf, max_cdf_f64, SweepOptions};
use tlqueue_core::{IntPolynomial, ModelParams, Probability, Schedule};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Product of two ascending coefficient lists.
fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn shape_points(xs: impl IntoIterator<Item = i64>, field: impl Fn(i64) -> BigInt) -> Vec<Point> {
    xs.into_iter().map(|x| (BigInt::from(x), field(x))).collect()
}

#[test]
fn spectral_matches_closed_form_away_from_one_third() {
    let opts = SweepOptions::default();
    for (ell, p) in [(2, r(1, 5)), (3, r(1, 5)), (2, r(2, 7)), (3, r(1, 4))] {
        let est = chi_spectral(ell, &p, &opts).unwrap();
        let closed = chi_closed(ell, &p).unwrap().to_f64().unwrap();
        assert!(
            ((est.value_f64 - closed) / closed).abs() < 1e-9,
            "ell = {ell}, p = {p}: {} vs {closed}",
            est.value_f64
        );
    }
}

#[test]
fn float_constants_agree_with_exact_ones() {
    for ell in 0..=3 {
        for p in [r(1, 7), r(1, 3), r(9, 20)] {
            let exact = chi_closed(ell, &p).unwrap().to_f64().unwrap();
            let fast = chi_f64(ell, p.to_f64().unwrap()).unwrap();
            assert!(((exact - fast) / exact).abs() < 1e-12, "ell = {ell}, p = {p}");
        }
    }
}

#[test]
fn a_data_fit_is_the_reversed_a_polynomial() {
    let fit = fit_int_poly(&shape_points((3..30).step_by(2), |x| chi3_integer_shape(x).unwrap().a), 12).unwrap();
    // x^8 a(1/x) for a(p) = 1 - 4p + 10p² - 52p³ + 226p⁴ - 520p⁵ + 640p⁶ - 400p⁷ + 100p⁸
    let expected = IntPolynomial::from_i64(&[100, -400, 640, -520, 226, -52, 10, -4, 1]).unwrap();
    assert_eq!(fit.polynomial, expected);
}

#[test]
fn b_data_fit_factors_through_x_minus_two_squared() {
    let fit = fit_int_poly(&shape_points((3..25).step_by(2), |x| chi3_integer_shape(x).unwrap().b), 10).unwrap();
    let expected = poly_mul(&[4, -4, 1], &[4, -8, 6, -2, 1]);
    assert_eq!(fit.polynomial, IntPolynomial::from_i64(&expected).unwrap());
}

#[test]
fn recognition_round_trips_closed_forms() {
    for x in [5, 7] {
        let value = chi_closed(3, &r(1, x)).unwrap();
        let digits = 220;
        let y = value.to_decimal(digits).unwrap();
        let minpoly = minimal_polynomial(&y, 4, digits).unwrap().polynomial;
        assert_eq!(minpoly.degree(), 4, "p = 1/{x}");
        let back = quartic_to_nested_radical(&minpoly, value.d(), value.to_f64().unwrap()).unwrap();
        assert_eq!(back, value, "p = 1/{x}");
    }
}

#[test]
fn exact_and_float_cdfs_agree() {
    let p = r(1, 3);
    for schedule in [Schedule::DeterministicBlocks(2), "pattern:RRG".parse().unwrap(), Schedule::RandomLights] {
        for m in 0..8 {
            let exact = exact_max_cdf(&p, &schedule, 60, m).unwrap().to_f64().unwrap();
            let float = max_cdf_f64(1.0 / 3.0, &schedule, 60, m).unwrap();
            assert!((exact - float).abs() < 1e-13, "{schedule} m = {m}");
        }
    }
}

#[test]
fn engines_match_exact_pmf_for_other_schedules() {
    let p = Probability::rational(1, 4);
    for schedule in ["pattern:RRGRG", "random", "block:4"] {
        let schedule: Schedule = schedule.parse().unwrap();
        let params = ModelParams::new(p.clone(), 1).unwrap();
        let oracle = exact_max_pmf(&r(1, 4), &schedule, 150).unwrap().to_table();
        let cfg = MonteCarloConfig { n: 150, runs: 40_000, seed: 11, workers: 2, engine: Engine::Auto };
        let res = monte_carlo(&params, &schedule, &cfg).unwrap();
        let fit = compare_distributions(&res.histogram, &oracle).unwrap();
        assert!(fit.p_value > 1e-4 && fit.tv < 0.015, "{schedule}: tv {}, p {}", fit.tv, fit.p_value);
    }
}
