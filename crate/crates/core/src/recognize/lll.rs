//! Integral LLL reduction (all Gram–Schmidt data kept as exact integers).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::RecognizeError;

/// Reduction quality `δ = 99/100`.
pub const DELTA: (i64, i64) = (99, 100);

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `a / b` for `b > 0`, halves rounded up.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    (a * BigInt::from(2) + b).div_floor(&(b * BigInt::from(2)))
}

/// LLL-reduces the rows of `basis` in place. Rows must be linearly
/// independent.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) -> Result<(), RecognizeError> {
    let n = basis.len();
    if n < 2 {
        return Ok(());
    }
    let (da, db) = (BigInt::from(DELTA.0), BigInt::from(DELTA.1));
    // d[0] = 1, d[i] = Gram determinant of the first i vectors (1-based)
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    d[1] = dot(&basis[0], &basis[0]);
    if d[1].is_zero() {
        return Err(RecognizeError::Precondition("lattice basis is dependent".into()));
    }
    let mut k = 2;
    let mut k_max = 1;
    while k <= n {
        if k > k_max {
            k_max = k;
            for j in 1..=k {
                let mut u = dot(&basis[k - 1], &basis[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(RecognizeError::Precondition("lattice basis is dependent".into()));
                    }
                    d[k] = u;
                }
            }
        }
        loop {
            reduce(basis, &mut lam, &d, k, k - 1);
            let lhs = &db * &d[k] * &d[k - 2];
            let rhs = &da * &d[k - 1] * &d[k - 1] - &db * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                swap(basis, &mut lam, &mut d, k, k_max);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    reduce(basis, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(())
}

#[allow(clippy::needless_range_loop)]
fn reduce(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    if (&lam[k][l] * BigInt::from(2)).abs() <= d[l] {
        return;
    }
    let q = round_div(&lam[k][l], &d[l]);
    let bl = basis[l - 1].clone();
    for (x, y) in basis[k - 1].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * &d[l];
    for i in 1..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

#[allow(clippy::needless_range_loop)]
fn swap(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, k_max: usize) {
    basis.swap(k - 1, k - 2);
    for j in 1..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
    for i in k + 1..=k_max {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k];
    }
    d[k - 1] = b;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn norm2(r: &[BigInt]) -> BigInt {
        dot(r, r)
    }

    fn det3(m: &[Vec<BigInt>]) -> BigInt {
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    #[test]
    fn reduces_small_basis() {
        let mut b = rows(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        lll_reduce(&mut b).unwrap();
        assert_eq!(det3(&b).abs(), BigInt::from(3));
        // the lattice contains (0, 1, 0)
        assert_eq!(norm2(&b[0]), BigInt::one());
    }

    #[test]
    fn finds_small_relation() {
        // 3·a - 2·b = 0 hidden behind a large scale
        let scale = BigInt::from(10).pow(30);
        let a = &scale * 2;
        let b = &scale * 3;
        let mut basis = vec![vec![BigInt::one(), BigInt::zero(), a], vec![BigInt::zero(), BigInt::one(), b]];
        lll_reduce(&mut basis).unwrap();
        let first = &basis[0];
        assert!(first[2].is_zero());
        assert_eq!(first[0].abs(), BigInt::from(3));
        assert_eq!(first[1].abs(), BigInt::from(2));
    }

    #[test]
    fn rejects_dependent_rows() {
        let mut b = rows(&[&[1, 2], &[2, 4]]);
        assert!(lll_reduce(&mut b).is_err());
    }
}
