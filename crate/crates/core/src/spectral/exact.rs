//! The law of `M_n` by dynamic programming on the chain killed above `k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::SpectralError;
use crate::closedform::PredictionTable;
use crate::model::{Phase, Schedule};

/// Mass the float pmf may leave beyond its last row.
pub const PMF_TAIL: f64 = 1e-13;

/// One step of the killed chain on integer weights scaled by `den` per step
/// (`den = b` for a fixed light, `2b` for random lights, where `p = a/b`).
fn int_step(v: &[BigInt], phase: Option<Phase>, a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let c = b - a;
    let k = v.len() - 1;
    let red = |out: &mut Vec<BigInt>| {
        for j in 0..=k {
            out[j] += &c * &v[j];
            if j > 0 {
                out[j] += a * &v[j - 1];
            }
        }
    };
    let green = |out: &mut Vec<BigInt>| {
        out[0] += b * &v[0];
        for j in 0..=k {
            if j > 0 {
                out[j] += a * &v[j];
            }
            if j < k {
                out[j] += &c * &v[j + 1];
            }
        }
    };
    let mut out = vec![BigInt::zero(); k + 1];
    match phase {
        Some(Phase::Red) => red(&mut out),
        Some(Phase::Green) => green(&mut out),
        None => {
            red(&mut out);
            green(&mut out);
        }
    }
    out
}

fn float_step(v: &[f64], phase: Option<Phase>, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    let k = v.len() - 1;
    let mut out = vec![0.0; k + 1];
    let red = |out: &mut Vec<f64>, w: f64| {
        for j in 0..=k {
            out[j] += w * q * v[j];
            if j > 0 {
                out[j] += w * p * v[j - 1];
            }
        }
    };
    let green = |out: &mut Vec<f64>, w: f64| {
        out[0] += w * v[0];
        for j in 0..=k {
            if j > 0 {
                out[j] += w * p * v[j];
            }
            if j < k {
                out[j] += w * q * v[j + 1];
            }
        }
    };
    match phase {
        Some(Phase::Red) => red(&mut out, 1.0),
        Some(Phase::Green) => green(&mut out, 1.0),
        None => {
            red(&mut out, 0.5);
            green(&mut out, 0.5);
        }
    }
    out
}

/// Light colours of steps `1..=n`; `None` marks a random-light step.
fn phases(schedule: &Schedule, n: u64) -> impl Iterator<Item = Option<Phase>> + '_ {
    let word = schedule.period_word();
    (0..n).map(move |i| word.as_ref().map(|w| w[(i % w.len() as u64) as usize]))
}

fn check_p(p: &BigRational) -> Result<(), SpectralError> {
    if *p < BigRational::zero() || *p > BigRational::one() {
        return Err(SpectralError::Precondition(format!("p = {p} is not a probability")));
    }
    Ok(())
}

/// `P{M_n <= k}` exactly.
pub fn exact_max_cdf(p: &BigRational, schedule: &Schedule, n: u64, k: u64) -> Result<BigRational, SpectralError> {
    check_p(p)?;
    if k >= schedule.red_steps(n) {
        return Ok(BigRational::one());
    }
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let per_step = if schedule.is_deterministic() { b.clone() } else { &b * 2 };
    let mut v = vec![BigInt::zero(); k as usize + 1];
    v[0] = BigInt::one();
    for phase in phases(schedule, n) {
        v = int_step(&v, phase, &a, &b);
    }
    let total: BigInt = v.iter().sum();
    Ok(BigRational::new(total, num_traits::pow(per_step, n as usize)))
}

/// Exact pmf of `M_n` over levels `0..=red_steps(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPmf {
    pub ell: Option<u32>,
    pub n: u64,
    pub p: BigRational,
    pub levels: Vec<BigRational>,
}

impl ExactPmf {
    pub fn total(&self) -> BigRational {
        self.levels.iter().fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn to_table(&self) -> PredictionTable {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        PredictionTable::from_pmf(
            self.ell,
            p,
            self.n,
            self.levels.iter().enumerate().map(|(m, w)| (m as u64, w.to_f64().unwrap_or(0.0))),
        )
    }
}

fn schedule_ell(schedule: &Schedule) -> Option<u32> {
    match schedule {
        Schedule::DeterministicBlocks(ell) => Some(*ell),
        _ => None,
    }
}

/// Differences of [`exact_max_cdf`] over `k = 0..=red_steps(n)`; sums to 1.
pub fn exact_max_pmf(p: &BigRational, schedule: &Schedule, n: u64) -> Result<ExactPmf, SpectralError> {
    let top = schedule.red_steps(n);
    let mut prev = BigRational::zero();
    let mut levels = Vec::with_capacity(top as usize + 1);
    for k in 0..=top {
        let c = exact_max_cdf(p, schedule, n, k)?;
        levels.push(&c - &prev);
        prev = c;
    }
    Ok(ExactPmf { ell: schedule_ell(schedule), n, p: p.clone(), levels })
}

type Dense = Vec<Vec<f64>>;

fn mat_mul(x: &Dense, y: &Dense) -> Dense {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for t in 0..n {
            let a = x[i][t];
            if a == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a * y[t][j];
            }
        }
    }
    out
}

fn vec_mat(v: &[f64], m: &Dense) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (i, &a) in v.iter().enumerate() {
        if a != 0.0 {
            for (o, &x) in out.iter_mut().zip(&m[i]) {
                *o += a * x;
            }
        }
    }
    out
}

/// `P{M_n <= k}` in double precision. Long runs use repeated squaring of the
/// one-period transition matrix.
pub fn max_cdf_f64(p: f64, schedule: &Schedule, n: u64, k: u64) -> Result<f64, SpectralError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SpectralError::Precondition(format!("p = {p} is not a probability")));
    }
    if k >= schedule.red_steps(n) {
        return Ok(1.0);
    }
    let dim = k as usize + 1;
    let period: Vec<Option<Phase>> = match schedule.period_word() {
        Some(w) => w.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let len = period.len() as u64;
    let cycles = n / len;
    let direct_cost = n as f64 * dim as f64;
    let power_cost =
        (dim as f64).powi(3) * 2.0 * (cycles.max(1) as f64).log2().max(1.0) + (dim * dim) as f64 * len as f64;

    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    if direct_cost <= power_cost {
        for i in 0..n {
            v = float_step(&v, period[(i % len) as usize], p);
        }
    } else {
        // rows of the one-period matrix are images of unit vectors
        let mut cycle: Dense = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                period.iter().fold(e, |acc, &ph| float_step(&acc, ph, p))
            })
            .collect();
        let mut c = cycles;
        while c > 0 {
            if c & 1 == 1 {
                v = vec_mat(&v, &cycle);
            }
            c >>= 1;
            if c > 0 {
                cycle = mat_mul(&cycle, &cycle);
            }
        }
        for &ph in &period[..(n % len) as usize] {
            v = float_step(&v, ph, p);
        }
    }
    Ok(v.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// Pmf of `M_n` in double precision, from level 0 until the CDF is within
/// [`PMF_TAIL`] of 1.
pub fn max_pmf_f64(p: f64, schedule: &Schedule, n: u64) -> Result<PredictionTable, SpectralError> {
    let top = schedule.red_steps(n);
    let mut cdf = Vec::new();
    for k in 0..=top {
        let c = max_cdf_f64(p, schedule, n, k)?;
        cdf.push(c);
        if c >= 1.0 - PMF_TAIL {
            break;
        }
    }
    let mut table = PredictionTable::from_cdf(schedule_ell(schedule), p, n, cdf);
    table.tail_tolerance = PMF_TAIL;
    Ok(table)
}
