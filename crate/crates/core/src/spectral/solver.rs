use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::banded::{banded_pivots, green_kernel, red_kernel, BandedMatrix, BandedRationalMatrix};
use super::SpectralError;
use crate::precision::{bits_for_digits, Fixed};

/// First trial value of the scaled root variable.
pub const EPS_START: f64 = 0.1;
/// Largest scaled root the bracket search will try.
pub const EPS_CAP: f64 = 1e6;

/// `W = U_k^ℓ V_k^ℓ`, exact.
pub fn build_cycle_matrix(k: usize, ell: u32, p: &BigRational) -> Result<BandedRationalMatrix, SpectralError> {
    if ell == 0 {
        return Err(SpectralError::Precondition("ell must be at least 1".into()));
    }
    if !p.is_positive() || *p >= BigRational::one() {
        return Err(SpectralError::Precondition(format!("p = {p} must lie in (0, 1)")));
    }
    let u = red_kernel(k, p);
    let v = green_kernel(k, p);
    let mut w = BandedRationalMatrix::identity(k + 1);
    for _ in 0..ell {
        w = w.matmul(&u);
    }
    for _ in 0..ell {
        w = w.matmul(&v);
    }
    Ok(w)
}

/// Working precision as a function of the truncation level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrecisionPolicy {
    pub guard_digits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { guard_digits: 60 }
    }
}

impl PrecisionPolicy {
    /// `ceil(2k log10(q/p)) + guard_digits`.
    pub fn digits(&self, k: usize, p: &BigRational) -> u32 {
        let q = BigRational::one() - p;
        let lr = ratio_log10(&q) - ratio_log10(p);
        (2.0 * k as f64 * lr).ceil().max(0.0) as u32 + self.guard_digits
    }
}

fn ratio_log10(r: &BigRational) -> f64 {
    let digits = |n: &BigInt| {
        let bits = n.bits();
        let shift = bits.saturating_sub(60);
        (n >> shift).to_f64().unwrap().log10() + shift as f64 * std::f64::consts::LOG10_2
    };
    digits(r.numer()) - digits(r.denom())
}

/// A determinant held as `mantissa · 2^exp2` with `|mantissa|` in `[1/2, 1)`
/// (or zero), so that tiny values keep full relative precision.
#[derive(Clone, Debug, PartialEq)]
pub struct DetValue {
    pub mantissa: Fixed,
    pub exp2: i64,
}

impl DetValue {
    fn one(bits: u32) -> Self {
        DetValue { mantissa: Fixed::one(bits), exp2: 0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exp2 = 0;
            return self;
        }
        // |mantissa| = mant / 2^bits; we want its top bit at position bits - 1
        let top = self.mantissa.mantissa().bits() as i64;
        let shift = i64::from(self.mantissa.bits()) - top;
        self.mantissa = self.mantissa.shl(shift);
        self.exp2 -= shift;
        self
    }

    fn times(&self, x: &Fixed) -> Self {
        DetValue { mantissa: &self.mantissa * x, exp2: self.exp2 }.normalized()
    }

    pub fn signum(&self) -> i32 {
        self.mantissa.signum()
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa.to_f64() * 2f64.powf(self.exp2 as f64)
    }

    /// The value at the mantissa's scale (may round to zero).
    pub fn to_fixed(&self) -> Fixed {
        self.mantissa.shl(self.exp2)
    }

    /// `self / other` as a double; `other` must be nonzero.
    fn ratio_f64(&self, other: &DetValue) -> f64 {
        self.mantissa.to_f64() / other.mantissa.to_f64() * 2f64.powf((self.exp2 - other.exp2) as f64)
    }

    fn halved(&self) -> Self {
        DetValue { mantissa: self.mantissa.clone(), exp2: self.exp2 - 1 }
    }
}

/// `det(I - zW)` in fixed point at `digits` decimal digits.
pub fn char_value(w: &BandedRationalMatrix, z: &Fixed, digits: u32) -> Result<DetValue, SpectralError> {
    if digits < 20 {
        return Err(SpectralError::Precondition("char_value needs at least 20 digits".into()));
    }
    let bits = bits_for_digits(digits);
    let z = z.with_bits(bits);
    let wf = w.map(|x| Fixed::from_ratio(x, bits));
    char_value_prepared(&wf, &z, &Fixed::zero(bits))
}

/// `det(I - (z0 + dz) W)` with `W` already rounded to fixed point.
fn char_value_prepared(wf: &BandedMatrix<Fixed>, z0: &Fixed, dz: &Fixed) -> Result<DetValue, SpectralError> {
    let bits = z0.bits();
    let n = wf.dim();
    let mut a = BandedMatrix::zeros(n, wf.lower(), wf.upper());
    for i in 0..n {
        for j in wf.row_range(i) {
            let wij = wf.get(i, j);
            let zw = &(&wij * z0) + &(&wij * dz);
            let entry = if i == j { &Fixed::one(bits) - &zw } else { -&zw };
            a.set(i, j, entry);
        }
    }
    let pivots = banded_pivots(a, &|| format!("I - zW at z = {}", (z0 + dz).to_decimal(30)))?;
    Ok(pivots.iter().fold(DetValue::one(bits), |acc, piv| acc.times(piv)))
}

/// `det(I - zW)` exactly, for rational `z`.
pub fn char_value_exact(w: &BandedRationalMatrix, z: &BigRational) -> Result<BigRational, SpectralError> {
    let n = w.dim();
    let mut a = BandedMatrix::zeros(n, w.lower(), w.upper());
    for i in 0..n {
        for j in w.row_range(i) {
            let zw = z * w.get(i, j);
            a.set(i, j, if i == j { BigRational::one() - zw } else { -zw });
        }
    }
    let pivots = banded_pivots(a, &|| format!("I - zW at z = {z}"))?;
    Ok(pivots.iter().fold(BigRational::one(), |acc, piv| acc * piv))
}

/// The root of `det(I - zW)` closest to 1, with its scaled offset.
#[derive(Clone, Debug, PartialEq)]
pub struct ZRoot {
    pub k: usize,
    pub z: Fixed,
    /// `(z - 1) (q/p)^{2k}`.
    pub ratio: Fixed,
    pub digits: u32,
}

fn check_subcritical(p: &BigRational) -> Result<(), SpectralError> {
    let half = BigRational::new(1.into(), 2.into());
    if !p.is_positive() || *p >= half {
        return Err(SpectralError::Precondition(format!("p = {p} must satisfy 0 < p < 1/2")));
    }
    Ok(())
}

/// `(p/q)^{2k}`.
fn scale_factor(p: &BigRational, k: usize) -> BigRational {
    let q = BigRational::one() - p;
    num_traits::pow(p / q, 2 * k)
}

/// Smallest root `z_k > 1` of `det(I - z U_k^ℓ V_k^ℓ)`.
///
/// The search runs in `ε = (z - 1)(q/p)^{2k}`: bracket from [`EPS_START`]
/// by doubling (or halving), then Illinois-style regula falsi.
pub fn solve_z(k: usize, ell: u32, p: &BigRational, policy: PrecisionPolicy) -> Result<ZRoot, SpectralError> {
    check_subcritical(p)?;
    let w = build_cycle_matrix(k, ell, p)?;
    let digits = policy.digits(k, p);
    let bits = bits_for_digits(digits);
    let wf = w.map(|x| Fixed::from_ratio(x, bits));
    let s = Fixed::from_ratio(&scale_factor(p, k), bits);
    let one = Fixed::one(bits);
    let eval = |eps: &Fixed| char_value_prepared(&wf, &one, &(eps * &s));

    let no_root = |what: &str| SpectralError::NonConvergence {
        message: format!("k = {k}, ell = {ell}, p = {p}: {what}"),
        estimate: None,
    };

    let start = Fixed::from_f64(EPS_START, bits).unwrap();
    let cap = Fixed::from_f64(EPS_CAP, bits).unwrap();
    let floor = Fixed::from_f64(1e-30, bits).unwrap();
    let f_start = eval(&start)?;
    let (mut lo, mut f_lo, mut hi, mut f_hi);
    if f_start.signum() > 0 {
        (lo, f_lo) = (start.clone(), f_start);
        hi = start.shl(1);
        loop {
            let f = eval(&hi)?;
            if f.signum() <= 0 {
                f_hi = f;
                break;
            }
            if hi > cap {
                return Err(no_root(&format!("no sign change for ε in [0, {EPS_CAP}]")));
            }
            (lo, f_lo) = (hi.clone(), f);
            hi = hi.shl(1);
        }
    } else {
        (hi, f_hi) = (start.clone(), f_start);
        lo = start.shl(-1);
        loop {
            let f = eval(&lo)?;
            if f.signum() > 0 {
                f_lo = f;
                break;
            }
            if lo < floor {
                return Err(no_root("determinant nonpositive down to ε = 1e-30"));
            }
            (hi, f_hi) = (lo.clone(), f);
            lo = lo.shl(-1);
        }
    }
    if f_hi.signum() == 0 {
        return Ok(finish(k, &hi, &s, &one, digits));
    }

    let target_digits = policy.guard_digits.saturating_sub(5).max(10);
    let tol = Fixed::from_ratio(&BigRational::new(1.into(), BigInt::from(10u32).pow(target_digits)), bits);
    let mut side = 0i32;
    for _ in 0..400 {
        if (&hi - &lo) <= tol {
            let mid = (&lo + &hi).shl(-1);
            return Ok(finish(k, &mid, &s, &one, digits));
        }
        // regula falsi point: lo + w (hi - lo) with w = f_lo / (f_lo - f_hi)
        let r = f_hi.ratio_f64(&f_lo);
        let weight = 1.0 / (1.0 - r);
        let width = &hi - &lo;
        let mut x = if weight.is_finite() && weight > 0.0 && weight < 1.0 {
            &lo + &(&width * &Fixed::from_f64(weight, bits).unwrap())
        } else {
            (&lo + &hi).shl(-1)
        };
        if x <= lo || x >= hi {
            x = (&lo + &hi).shl(-1);
        }
        let fx = eval(&x)?;
        match fx.signum() {
            0 => return Ok(finish(k, &x, &s, &one, digits)),
            1 => {
                (lo, f_lo) = (x, fx);
                if side == 1 {
                    f_hi = f_hi.halved();
                }
                side = 1;
            }
            _ => {
                (hi, f_hi) = (x, fx);
                if side == -1 {
                    f_lo = f_lo.halved();
                }
                side = -1;
            }
        }
    }
    Err(no_root("root refinement did not reach the target width"))
}

fn finish(k: usize, eps: &Fixed, s: &Fixed, one: &Fixed, digits: u32) -> ZRoot {
    ZRoot { k, z: one + &(eps * s), ratio: eps.clone(), digits }
}

/// Exact-rational bisection for the scaled root: returns `(lo, hi)` with the
/// sign change of `det(I - zW)` inside, after `iterations` halvings of the
/// initial bracket. Slow; intended for small `k`.
pub fn solve_z_exact(
    k: usize,
    ell: u32,
    p: &BigRational,
    iterations: u32,
) -> Result<(BigRational, BigRational), SpectralError> {
    check_subcritical(p)?;
    let w = build_cycle_matrix(k, ell, p)?;
    let s = scale_factor(p, k);
    let sign = |eps: &BigRational| -> Result<i32, SpectralError> {
        let d = char_value_exact(&w, &(BigRational::one() + eps * &s))?;
        Ok(if d.is_positive() {
            1
        } else if d.is_zero() {
            0
        } else {
            -1
        })
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::new(1.into(), 10.into());
    while sign(&hi)? > 0 {
        lo = hi.clone();
        hi = &hi * BigInt::from(2);
        if hi > BigRational::from_integer(1_000_000.into()) {
            return Err(SpectralError::NonConvergence { message: "no sign change".into(), estimate: None });
        }
    }
    for _ in 0..iterations {
        let mid = (&lo + &hi) / BigInt::from(2);
        match sign(&mid)? {
            0 => return Ok((mid.clone(), mid)),
            1 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok((lo, hi))
}

/// One row of the sweep table.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiRow {
    pub k: usize,
    pub z: String,
    pub ratio: String,
    pub ratio_f64: f64,
}

impl Serialize for ChiRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.k, &self.z, &self.ratio).serialize(serializer)
    }
}

/// Spectral estimate of `χ_ℓ(p)` from a sweep over `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiEstimate {
    pub ell: u32,
    pub p: String,
    pub table: Vec<ChiRow>,
    pub value: String,
    #[serde(skip)]
    pub value_f64: f64,
    pub converged: bool,
    pub digits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub k_max: usize,
    pub step: usize,
    /// Relative agreement of successive ratios that counts as converged.
    pub tol: f64,
    pub policy: PrecisionPolicy,
    /// Truncation levels evaluated concurrently.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { k_max: 400, step: 10, tol: 1e-12, policy: PrecisionPolicy::default(), workers: 1 }
    }
}

/// Sweeps `k = step, 2 step, …` up to `k_max`, stopping at the first pair of
/// successive ratios that agree to `tol`.
pub fn chi_spectral(ell: u32, p: &BigRational, opts: &SweepOptions) -> Result<ChiEstimate, SpectralError> {
    check_subcritical(p)?;
    if opts.step == 0 || opts.k_max < 2 * opts.step {
        return Err(SpectralError::Precondition(format!(
            "need step >= 1 and k_max >= 2 step (got step {}, k_max {})",
            opts.step, opts.k_max
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SpectralError::Precondition("tolerance must be positive".into()));
    }
    let workers = opts.workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SpectralError::Precondition(format!("thread pool: {e}")))?;
    let ks: Vec<usize> = (1..=opts.k_max / opts.step).map(|i| i * opts.step).collect();
    let ratio_digits = opts.policy.guard_digits;

    let mut est = ChiEstimate {
        ell,
        p: p.to_string(),
        table: Vec::new(),
        value: String::new(),
        value_f64: f64::NAN,
        converged: false,
        digits: 0,
    };
    for batch in ks.chunks(workers) {
        let roots: Vec<Result<ZRoot, SpectralError>> =
            pool.install(|| batch.par_iter().map(|&k| solve_z(k, ell, p, opts.policy)).collect());
        for root in roots {
            let root = root?;
            let ratio_f64 = root.ratio.to_f64();
            let row = ChiRow {
                k: root.k,
                z: root.z.to_decimal(root.digits),
                ratio: root.ratio.to_decimal(ratio_digits),
                ratio_f64,
            };
            let prev = est.table.last().map(|r| r.ratio_f64);
            est.value = row.ratio.clone();
            est.value_f64 = ratio_f64;
            est.table.push(row);
            if let Some(prev) = prev {
                let rel = ((ratio_f64 - prev) / ratio_f64).abs();
                est.digits = if rel == 0.0 {
                    ratio_digits.saturating_sub(5)
                } else {
                    ((-rel.log10()).floor().max(0.0) as u32).min(ratio_digits.saturating_sub(5))
                };
                if rel <= opts.tol {
                    est.converged = true;
                    return Ok(est);
                }
            }
        }
    }
    Err(SpectralError::NonConvergence {
        message: format!("ratios did not settle to {} by k = {}", opts.tol, opts.k_max),
        estimate: Some(Box::new(est)),
    })
}
