//! Dense linear algebra over F_p by Gaussian elimination.

use crate::error::{Error, Result};
use crate::primefield::PrimeChar;

pub type Matrix = Vec<Vec<u64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn mat_mul(p: PrimeChar, a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m, k) = (a.len(), b.first().map_or(0, Vec::len), b.len());
    let mut out = vec![vec![0; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = p.add(out[i][j], p.mul(a[i][l], b[l][j]));
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(p: PrimeChar, a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = p.inv(a[r][c]).expect("nonzero pivot");
        for v in a[r].iter_mut() {
            *v = p.mul(*v, inv);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in c..cols {
                    let t = p.mul(f, a[r][j]);
                    a[i][j] = p.sub(a[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(p: PrimeChar, a: &Matrix) -> usize {
    let mut m = a.clone();
    row_reduce(p, &mut m).len()
}

pub fn inverse(p: PrimeChar, a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().copied().chain(e).collect())
        .collect();
    let pivots = row_reduce(p, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::DivisionByZero(p.get()));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// The unique solution of `a x = b`, or `None` if the system is singular or inconsistent.
pub fn solve_unique(p: PrimeChar, a: &Matrix, b: &[u64]) -> Option<Vec<u64>> {
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    let pivots = row_reduce(p, &mut aug);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_by_two() {
        let p = PrimeChar::new(5).unwrap();
        let a = vec![vec![2, 1], vec![1, 0]];
        let inv = inverse(p, &a).unwrap();
        assert_eq!(inv, vec![vec![0, 1], vec![1, 3]]);
        assert_eq!(mat_mul(p, &a, &inv), identity(2));
        assert!(inverse(p, &vec![vec![1, 2], vec![2, 4]]).is_err());
    }

    #[test]
    fn solve_and_rank() {
        let p = PrimeChar::new(3).unwrap();
        let a = vec![vec![1, 1], vec![1, 2]];
        assert_eq!(solve_unique(p, &a, &[2, 0]), Some(vec![1, 1]));
        assert_eq!(rank(p, &vec![vec![1, 2], vec![2, 1]]), 1);
    }
}
