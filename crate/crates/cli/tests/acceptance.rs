//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use tlqueue_core::closedform::{
    chi3_integer_shape, chi_closed, expected_max, gumbel_cdf, gumbel_pmf, linspace, strategy_table,
};
use tlqueue_core::recognize::{fit_int_poly, minimal_polynomial, quartic_to_nested_radical, rescale_scan, Point};
use tlqueue_core::simulate::{compare_distributions, monte_carlo, Engine, MonteCarloConfig};
use tlqueue_core::spectral::{chi_spectral, exact_max_pmf, max_cdf_f64, SweepOptions};
use tlqueue_core::{IntPolynomial, ModelParams, Probability, RadicalValue, Schedule};

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `outer · [A + B√D + C√(E + F√D)] / G` as printed.
fn printed(outer: i128, [a, b, d, c, e, f, g]: [i128; 7]) -> RadicalValue {
    RadicalValue::from_integers([outer * a, outer * b, d, outer * c, e, f, g]).unwrap()
}

fn criterion_1() -> Outcome {
    let cases: Vec<(i64, Vec<RadicalValue>)> = vec![
        (3, vec![printed(1, [1393, 61, 217, 1, 2416130, 169946, 6144])]),
        (
            5,
            vec![
                printed(27, [18025, 489, 1281, 5, 25206642, 705138, 1048576]),
                printed(9, [162225, 4401, 1281, 3, 5671494450, 158656050, 3145728]),
            ],
        ),
        (
            10,
            vec![
                printed(64, [16650025, 3818752, 19, 80, 86608486817, 19869473834, 1162261467]),
                printed(64, [66600100, 545536, 14896, 8, 138573578907200, 1135398504800, 4649045868]),
            ],
        ),
        (
            12,
            vec![
                printed(100, [76862569, 12636400, 37, 20, 29539863834326, 4856330834558, 7073843073]),
                printed(100, [307450276, 1805200, 29008, 10, 1890551285396864, 11100184764704, 28295372292]),
            ],
        ),
        (
            17,
            vec![
                printed(675, [613160569, 1882425, 106113, 5, 30079190568067506, 92338302727986, 274877906944]),
                printed(225, [5518445121, 16941825, 106113, 15, 270712715112607554, 831044724551874, 824633720832]),
            ],
        ),
        (
            19,
            vec![printed(
                289,
                [13775887153, 34281469, 161497, 17, 1313388976733016770, 3268219019952026, 2380311484416],
            )],
        ),
    ];
    let mut slowest = 0.0f64;
    for (x, forms) in &cases {
        let t = Instant::now();
        let value = chi_closed(3, &r(1, *x)).map_err(|e| e.to_string())?;
        for (i, form) in forms.iter().enumerate() {
            if &value != form {
                return Err(format!("p = 1/{x}: form {} differs from chi_closed = {value}", i + 1));
            }
        }
        let decimals: Vec<String> = forms.iter().map(|f| f.to_decimal(60).unwrap()).collect();
        if decimals.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("p = 1/{x}: printed forms disagree at 60 digits"));
        }
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    ensure(slowest < 1.0, format!("6 constants match, slowest {slowest:.3}s"))
}

fn chi1_oracle(p: &BigRational) -> f64 {
    let q = BigRational::one() - p;
    (p * (&q - p) * (&q - p) / (&q * &q * &q)).to_f64().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_2() -> Outcome {
    let opts = SweepOptions::default();
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for p in [r(1, 5), r(1, 3), r(2, 5)] {
        let t = Instant::now();
        let est = chi_spectral(1, &p, &opts).map_err(|e| format!("p = {p}: {e}"))?;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let err = rel(est.value_f64, chi1_oracle(&p));
        worst = worst.max(err);
        if err > 1e-8 {
            return Err(format!("p = {p}: spectral {} vs {}", est.value_f64, chi1_oracle(&p)));
        }
    }
    ensure(slowest < 300.0, format!("max relative error {worst:.1e}, slowest {slowest:.1}s"))
}

fn criterion_3() -> Outcome {
    let chi2 = (49.0 + 9.0 * 17f64.sqrt()) / 256.0;
    let s217 = 217f64.sqrt();
    let chi3 = (1393.0 + 61.0 * s217 + (2416130.0 + 169946.0 * s217).sqrt()) / 6144.0;
    let opts = SweepOptions::default();
    let mut details = Vec::new();
    for (ell, want) in [(2, chi2), (3, chi3)] {
        let est = chi_spectral(ell, &r(1, 3), &opts).map_err(|e| format!("ell = {ell}: {e}"))?;
        let err = rel(est.value_f64, want);
        if err > 1e-6 {
            return Err(format!("ell = {ell}: spectral {} vs {want}", est.value_f64));
        }
        details.push(format!("ell={ell} rel err {err:.1e}"));
    }
    Ok(details.join(", "))
}

/// `(49 + 9√17)/256` to `digits` places by integer square roots.
fn chi2_decimal(digits: u32) -> String {
    let extra = digits + 10;
    let scale = BigInt::from(10).pow(extra);
    let root = (BigInt::from(17) * &scale * &scale).sqrt();
    let num = BigInt::from(49) * &scale + BigInt::from(9) * root;
    let q = (num * BigInt::from(10).pow(digits) / BigInt::from(256)) / &scale;
    let s = q.to_string();
    format!("0.{}", &s[..digits as usize])
}

fn criterion_4() -> Outcome {
    let y = chi2_decimal(60);
    let m = minimal_polynomial(&y, 4, 60).map_err(|e| e.to_string())?;
    let expected = IntPolynomial::from_i64(&[2, -49, 128]).unwrap();
    if m.polynomial != expected {
        return Err(format!("minimal polynomial {}", m.polynomial.render("y")));
    }
    let quartic = IntPolynomial::from_i64(&[243, -25074, 432960, -2852864, 3145728]).unwrap();
    let form = quartic_to_nested_radical(&quartic, &BigInt::from(217), 0.734).map_err(|e| e.to_string())?;
    let published = printed(1, [1393, 61, 217, 1, 2416130, 169946, 6144]);
    ensure(form == published, format!("{}; quartic gives {form}", m.polynomial.render("y")))
}

fn points(v: &[(i64, BigInt)]) -> Vec<Point> {
    v.iter().map(|(x, y)| (BigInt::from(*x), y.clone())).collect()
}

fn criterion_5() -> Outcome {
    let generated = [7, 9, 11, 13, 15, 21, 23, 25];
    let big = |s: &str| s.parse::<BigInt>().unwrap();

    // denominators: published values at x = 3, 5, 17, 19, then generated ones
    let mut den = vec![(3, big("6144")), (5, big("3145728")), (17, big("824633720832")), (19, big("2380311484416"))];
    den.extend(generated.iter().chain(&[27, 29]).map(|&x| (x, chi3_integer_shape(x).unwrap().denominator)));
    let den_fit = fit_int_poly(&points(&den), 12).map_err(|e| format!("denominator: {e}"))?;
    // 12 (x - 1)^9 expanded by the binomial theorem
    let binom: Vec<BigInt> = (0..=9u32)
        .map(|k| {
            let c: i64 = (0..k).fold(1i64, |acc, i| acc * (9 - i as i64) / (i as i64 + 1));
            BigInt::from(12 * c * if (9 - k) % 2 == 0 { 1 } else { -1 })
        })
        .collect();
    if den_fit.polynomial != IntPolynomial::new(binom).unwrap() {
        return Err(format!("denominator fit {}", den_fit.polynomial.render("x")));
    }

    let mut a_data = vec![(3, big("1393")), (5, big("162225")), (17, big("5518445121")), (19, big("13775887153"))];
    a_data.extend(generated.iter().chain(&[27, 29]).map(|&x| (x, chi3_integer_shape(x).unwrap().a)));
    let a_fit = fit_int_poly(&points(&a_data), 10).map_err(|e| format!("a-data: {e}"))?;
    let a_expected = IntPolynomial::from_i64(&[100, -400, 640, -520, 226, -52, 10, -4, 1]).unwrap();
    if a_fit.polynomial != a_expected {
        return Err(format!("a fit {}", a_fit.polynomial.render("x")));
    }

    // the cancelled a-values printed for p = 1/5 and p = 1/17 are a/9
    let mut cancelled = a_data.clone();
    cancelled[1].1 = big("18025");
    cancelled[2].1 = big("613160569");
    let scan = rescale_scan(&points(&cancelled), 30, 10).map_err(|e| format!("rescale: {e}"))?;
    let nines = scan.multipliers[1] == 9 && scan.multipliers[2] == 9;
    if scan.polynomial != a_expected || !nines {
        return Err(format!("rescale gave {} with multipliers {:?}", scan.polynomial.render("x"), scan.multipliers));
    }

    let mut divided = den.clone();
    divided[6].1 = &divided[6].1 / BigInt::from(3);
    let scan = rescale_scan(&points(&divided), 30, 12).map_err(|e| format!("synthetic rescale: {e}"))?;
    ensure(
        scan.polynomial == den_fit.polynomial && scan.multipliers[6] == 3,
        "12(x-1)^9 and degree-8 a recovered; multipliers 9, 9 and 3 found".to_string(),
    )
}

fn criterion_6() -> Outcome {
    let p = Probability::rational(1, 3);
    let mut worst_tv = 0.0f64;
    let mut worst_p = 1.0f64;
    for ell in 1..=3u32 {
        let schedule = Schedule::DeterministicBlocks(ell);
        let params = ModelParams::new(p.clone(), ell).unwrap();
        let oracle = exact_max_pmf(&r(1, 3), &schedule, 200).map_err(|e| e.to_string())?.to_table();
        for engine in [Engine::Stepwise, Engine::Blocked] {
            let cfg = MonteCarloConfig { n: 200, runs: 100_000, seed: 2024 + u64::from(ell), workers: 1, engine };
            let res = monte_carlo(&params, &schedule, &cfg).map_err(|e| e.to_string())?;
            let fit = compare_distributions(&res.histogram, &oracle).map_err(|e| e.to_string())?;
            worst_tv = worst_tv.max(fit.tv);
            worst_p = worst_p.min(fit.p_value);
            if fit.tv > 0.01 || fit.p_value <= 0.001 {
                return Err(format!("ell = {ell}, {engine:?}: tv {:.4}, p-value {:.4}", fit.tv, fit.p_value));
            }
        }
    }
    Ok(format!("max tv {worst_tv:.4}, min p-value {worst_p:.4}"))
}

fn criterion_7() -> Outcome {
    let schedule = Schedule::DeterministicBlocks(2);
    let params = ModelParams::new(Probability::rational(1, 3), 2).unwrap();
    let cfg = MonteCarloConfig { n: 1_000_000, runs: 20_000, seed: 42, workers: 4, engine: Engine::Auto };
    let res = monte_carlo(&params, &schedule, &cfg).map_err(|e| e.to_string())?;
    let pmf = gumbel_pmf(2, 1.0 / 3.0, 1_000_000).map_err(|e| e.to_string())?;
    let fit = compare_distributions(&res.histogram, &pmf).map_err(|e| e.to_string())?;
    let gap = (res.summary.mean - pmf.mean()).abs();
    ensure(fit.tv <= 0.03 && gap <= 0.1, format!("tv {:.4}, mean {:.4} vs {:.4}", fit.tv, res.summary.mean, pmf.mean()))
}

fn criterion_8() -> Outcome {
    let schedule = Schedule::DeterministicBlocks(1);
    let n = 100_000;
    let mut sup = 0.0f64;
    for m in 0..40u64 {
        let exact = max_cdf_f64(1.0 / 3.0, &schedule, n, m).map_err(|e| e.to_string())?;
        let approx = gumbel_cdf(1, 1.0 / 3.0, n, m as i64).map_err(|e| e.to_string())?;
        sup = sup.max((exact - approx).abs());
    }
    ensure(sup <= 0.02, format!("sup deviation {sup:.4}"))
}

fn criterion_9() -> Outcome {
    let n = 10_000_000_000u64;
    let rows = strategy_table(&linspace(0.15, 0.41, 100), n).map_err(|e| e.to_string())?;
    for row in &rows {
        let e = row.expected;
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if e[1] != min || e[0] != max {
            return Err(format!("ordering fails at p = {}: {:?}", row.p, e));
        }
    }
    let e1 = expected_max(1, 1.0 / 3.0, n).map_err(|e| e.to_string())?;
    let e0 = expected_max(0, 1.0 / 3.0, n).map_err(|e| e.to_string())?;
    ensure(
        (e1 - 15.526).abs() <= 0.001 && (e0 - 29.967).abs() <= 0.001,
        format!("E1 = {e1:.4}, E0 = {e0:.4} at p = 1/3"),
    )
}

fn tlqueue(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tlqueue"))
        .args(args)
        .current_dir(dir)
        .env_remove("TLQUEUE_WORKERS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("tlqueue {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_10() -> Outcome {
    let schedule = Schedule::DeterministicBlocks(2);
    let params = ModelParams::new(Probability::rational(1, 3), 2).unwrap();
    let run = |workers| {
        let cfg = MonteCarloConfig { n: 20_000, runs: 2_000, seed: 7, workers, engine: Engine::Auto };
        monte_carlo(&params, &schedule, &cfg).unwrap()
    };
    let (one, eight) = (run(1), run(8));
    if one.histogram != eight.histogram || one.summary != eight.summary {
        return Err("1 and 8 workers disagree".into());
    }

    let base = scratch_dir();
    let commands: [&[&str]; 8] = [
        &["chi", "closed", "--ell", "3", "--p", "1/3", "--digits", "50"],
        &["chi", "spectral", "--ell", "1", "--p", "1/3", "--k-max", "60", "--tol", "1e-8"],
        &["simulate", "--ell", "2", "--p", "1/3", "--n", "1e4", "--runs", "500", "--seed", "42", "--out", "hist.csv"],
        &["predict", "--ell", "2", "--p", "1/3", "--n", "1e4", "--out", "pmf.csv"],
        &["compare", "--hist", "hist.csv", "--pmf", "pmf.csv"],
        &["strategy", "--points", "20", "--out", "strategy.csv"],
        &["plot", "histogram", "--hist", "hist.csv", "--pmf", "pmf.csv", "--out", "hist.svg"],
        &["plot", "strategy", "--table", "strategy.csv", "--out", "strategy.svg"],
    ];
    let files = ["hist.csv", "pmf.csv", "strategy.csv", "hist.svg", "strategy.svg"];
    let mut runs = Vec::new();
    for round in 0..2 {
        let dir = base.join(format!("round{round}"));
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for args in commands {
            outputs.push(tlqueue(&dir, args)?);
        }
        for f in files {
            outputs.push(std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))?);
        }
        runs.push(outputs);
    }
    let _ = std::fs::remove_dir_all(&base);
    ensure(runs[0] == runs[1], format!("1 vs 8 workers identical; {} CLI outputs byte-identical", runs[0].len()))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tlqueue-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("published constants, ell = 3", criterion_1),
        ("spectral vs closed form, ell = 1", criterion_2),
        ("spectral reproduction, ell = 2, 3", criterion_3),
        ("recognition", criterion_4),
        ("regression recovery", criterion_5),
        ("oracle equivalence, n = 200", criterion_6),
        ("desk-scale histogram, n = 1e6", criterion_7),
        ("Gumbel calibration, ell = 1", criterion_8),
        ("strategy comparison", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
