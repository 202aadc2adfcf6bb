//! Banded matrices with exact entries, and determinants by unpivoted
//! banded elimination.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::SpectralError;
use crate::precision::Fixed;

/// Square matrix whose nonzero entries satisfy `i - lower <= j <= i + upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    dim: usize,
    lower: usize,
    upper: usize,
    data: Vec<T>,
}

pub type BandedRationalMatrix = BandedMatrix<BigRational>;

impl<T: Clone + Zero> BandedMatrix<T> {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Self {
        BandedMatrix { dim, lower, upper, data: vec![T::zero(); dim * (lower + upper + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (i < self.dim && j < self.dim && j + self.lower >= i && j <= i + self.upper)
            .then(|| i * (self.lower + self.upper + 1) + (j + self.lower - i))
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map(|s| self.data[s].clone()).unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let s = self.slot(i, j).expect("entry inside the band");
        self.data[s] = value;
    }

    /// Columns of row `i` that lie inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.dim)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> BandedMatrix<U> {
        BandedMatrix { dim: self.dim, lower: self.lower, upper: self.upper, data: self.data.iter().map(f).collect() }
    }

    /// Smallest bandwidths that hold every nonzero entry.
    pub fn effective_bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut hi) = (0, 0);
        for i in 0..self.dim {
            for j in self.row_range(i) {
                if !self.get(i, j).is_zero() {
                    lo = lo.max(i.saturating_sub(j));
                    hi = hi.max(j.saturating_sub(i));
                }
            }
        }
        (lo, hi)
    }
}

impl<T> BandedMatrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    /// Exact product; bandwidths add.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = BandedMatrix::zeros(self.dim, self.lower + rhs.lower, self.upper + rhs.upper);
        for i in 0..self.dim {
            for t in self.row_range(i) {
                let a = &self.data[self.slot(i, t).unwrap()];
                if a.is_zero() {
                    continue;
                }
                for j in rhs.row_range(t) {
                    let s = out.slot(i, j).unwrap();
                    let prod = a * &rhs.data[rhs.slot(t, j).unwrap()];
                    out.data[s] = &out.data[s] + &prod;
                }
            }
        }
        out
    }
}

impl BandedRationalMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = BandedMatrix::zeros(dim, 0, 0);
        for i in 0..dim {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Largest row sum.
    pub fn max_row_sum(&self) -> BigRational {
        (0..self.dim)
            .map(|i| self.row_range(i).map(|j| self.get(i, j)).fold(BigRational::zero(), |a, b| a + b))
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// The red-step kernel killed above level `k`: diagonal `q`, superdiagonal `p`.
pub fn red_kernel(k: usize, p: &BigRational) -> BandedRationalMatrix {
    let q = BigRational::one() - p;
    let mut u = BandedMatrix::zeros(k + 1, 0, 1);
    for i in 0..=k {
        u.set(i, i, q.clone());
        if i < k {
            u.set(i, i + 1, p.clone());
        }
    }
    u
}

/// The green-step kernel: state 0 stays put, otherwise subdiagonal `q` and
/// diagonal `p`.
pub fn green_kernel(k: usize, p: &BigRational) -> BandedRationalMatrix {
    let q = BigRational::one() - p;
    let mut v = BandedMatrix::zeros(k + 1, 1, 0);
    v.set(0, 0, BigRational::one());
    for i in 1..=k {
        v.set(i, i - 1, q.clone());
        v.set(i, i, p.clone());
    }
    v
}

/// Determinant of a banded matrix by elimination without pivoting.
///
/// Returns the pivots; the determinant is their product. A zero pivot is an
/// error (`what` names the matrix in the message).
pub fn banded_pivots<T>(mut a: BandedMatrix<T>, what: &dyn Fn() -> String) -> Result<Vec<T>, SpectralError>
where
    T: Clone + Zero + Divide,
    for<'a> &'a T: Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let n = a.dim;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let pivot = a.get(col, col);
        if pivot.is_zero() && col + 1 < n {
            return Err(SpectralError::SingularPivot(what()));
        }
        let last_row = (col + a.lower).min(n - 1);
        let last_col = (col + a.upper).min(n - 1);
        for row in col + 1..=last_row {
            let below = a.get(row, col);
            if below.is_zero() {
                continue;
            }
            let factor = below.divide(&pivot);
            for j in col + 1..=last_col {
                let s = a.slot(row, j).expect("fill stays within the band");
                let update = &factor * &a.data[a.slot(col, j).unwrap()];
                a.data[s] = &a.data[s] - &update;
            }
            let s = a.slot(row, col).unwrap();
            a.data[s] = T::zero();
        }
        pivots.push(pivot);
    }
    Ok(pivots)
}

/// Division, spelled out because `Fixed` has no `Div` operator.
pub trait Divide {
    fn divide(&self, rhs: &Self) -> Self;
}

impl Divide for BigRational {
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl Divide for Fixed {
    fn divide(&self, rhs: &Self) -> Self {
        self.div(rhs)
    }
}

impl Zero for Fixed {
    fn zero() -> Self {
        // Only used to fill band slots that are overwritten before use.
        Fixed::zero(0)
    }
    fn is_zero(&self) -> bool {
        Fixed::is_zero(self)
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        &self + &rhs
    }
}
