//! Automorphisms of finite-dimensional central simple algebras given by
//! structure constants, inverted through coordinate functionals realised
//! as sums `x -> sum a x b`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::primefield::PrimeChar;

/// An algebra with basis `e_1 = 1, e_2, ..., e_N`; `table[i][j]` holds the
/// coordinates of `e_i e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstantAlgebra {
    p: PrimeChar,
    table: Vec<Vec<Vec<u64>>>,
    /// `Some(r)` when the basis is the standard one of `M_r` (see [`StructureConstantAlgebra::matrix_algebra`]).
    matrix_size: Option<usize>,
}

impl StructureConstantAlgebra {
    pub fn new(p: PrimeChar, table: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|v| v.len() != n)) {
            return Err(Error::InvalidAlgebra("structure table must be N x N x N".into()));
        }
        let table: Vec<Vec<Vec<u64>>> =
            table.into_iter().map(|r| r.into_iter().map(|v| v.into_iter().map(|c| p.reduce(c)).collect()).collect()).collect();
        let alg = StructureConstantAlgebra { p, table, matrix_size: None };
        for i in 0..n {
            let ei = alg.basis(i);
            if alg.table[0][i] != ei || alg.table[i][0] != ei {
                return Err(Error::InvalidAlgebra(format!("e1 is not a two-sided identity on e{}", i + 1)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = alg.mul(&alg.table[i][j], &alg.basis(k));
                    let r = alg.mul(&alg.basis(i), &alg.table[j][k]);
                    if l != r {
                        return Err(Error::InvalidAlgebra(format!(
                            "(e{} e{}) e{} != e{} (e{} e{})",
                            i + 1,
                            j + 1,
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// `M_r(F_p)` with basis `1` followed by the matrix units `E_ij`,
    /// `(i, j) != (r, r)`, in row-major order.
    pub fn matrix_algebra(p: PrimeChar, r: usize) -> Self {
        let units: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).filter(|&u| u != (r - 1, r - 1)).collect();
        let basis: Vec<Matrix> = std::iter::once(linalg::identity(r))
            .chain(units.iter().map(|&(i, j)| {
                let mut m = vec![vec![0; r]; r];
                m[i][j] = 1;
                m
            }))
            .collect();
        let mut alg = StructureConstantAlgebra { p, table: Vec::new(), matrix_size: Some(r) };
        alg.table = basis.iter().map(|a| basis.iter().map(|b| alg.from_matrix(&linalg::mat_mul(p, a, b))).collect()).collect();
        alg
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn matrix_size(&self) -> Option<usize> {
        self.matrix_size
    }

    pub fn table(&self) -> &[Vec<Vec<u64>>] {
        &self.table
    }

    /// Coordinates of `e_(i+1)`.
    pub fn basis(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    pub fn one(&self) -> Vec<u64> {
        self.basis(0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.p.add(x, y)).collect()
    }

    pub fn scale(&self, c: u64, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.p.mul(c, x)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0; self.dim()];
        for (i, &ai) in a.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (j, &bj) in b.iter().enumerate().filter(|(_, &c)| c != 0) {
                let c = p.mul(ai, bj);
                for (o, &t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o = p.add(*o, p.mul(c, t));
                }
            }
        }
        out
    }

    /// Coordinates of a matrix in the basis of [`StructureConstantAlgebra::matrix_algebra`].
    pub fn from_matrix(&self, m: &Matrix) -> Vec<u64> {
        let r = self.matrix_size.expect("matrix algebra");
        let p = self.p;
        let last = m[r - 1][r - 1];
        let mut v = vec![last];
        for i in 0..r {
            for j in 0..r {
                if (i, j) != (r - 1, r - 1) {
                    v.push(if i == j { p.sub(m[i][j], last) } else { p.reduce(m[i][j]) });
                }
            }
        }
        v
    }

    pub fn to_matrix(&self, v: &[u64]) -> Matrix {
        let r = self.matrix_size.expect("matrix algebra");
        let p = self.p;
        let mut m = vec![vec![0; r]; r];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = v[0];
        }
        let mut k = 1;
        for i in 0..r {
            for j in 0..r {
                if (i, j) != (r - 1, r - 1) {
                    m[i][j] = p.add(m[i][j], v[k]);
                    k += 1;
                }
            }
        }
        m
    }

    /// The `N^2 x N^2` matrix whose column `(i, k)` is `x -> e_i x e_k` flattened.
    fn two_sided_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut cols = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                let mut col = Vec::with_capacity(n * n);
                for l in 0..n {
                    col.extend(self.mul(&self.table[i][l], &self.basis(k)));
                }
                cols.push(col);
            }
        }
        linalg::transpose(&cols)
    }
}

/// `A (x) A^op -> End(A)` is bijective.
pub fn verify_central_simple(a: &StructureConstantAlgebra) -> bool {
    let n = a.dim();
    linalg::rank(a.prime(), &a.two_sided_matrix()) == n * n
}

/// For each `j`, pairs `(a, b)` with `sum a x b = lambda_j(x) e_1`, where
/// `lambda_j` is the `j`-th coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalRealization {
    pub pairs: Vec<Vec<(Vec<u64>, Vec<u64>)>>,
}

impl FunctionalRealization {
    /// `sum_nu a_nu x b_nu` for coordinate `j`.
    pub fn evaluate(&self, alg: &StructureConstantAlgebra, j: usize, x: &[u64]) -> Vec<u64> {
        self.pairs[j].iter().fold(vec![0; alg.dim()], |acc, (a, b)| alg.add(&acc, &alg.mul(&alg.mul(a, x), b)))
    }

    /// Checks the realization on every basis element.
    pub fn check(&self, alg: &StructureConstantAlgebra) -> bool {
        let n = alg.dim();
        (0..n).all(|j| (0..n).all(|l| self.evaluate(alg, j, &alg.basis(l)) == alg.scale(u64::from(j == l), &alg.one())))
    }
}

/// Solves for the coordinate functionals as elements of `A (x) A^op`.
pub fn density_solve(a: &StructureConstantAlgebra) -> Result<FunctionalRealization> {
    let n = a.dim();
    let m = a.two_sided_matrix();
    let mut pairs = Vec::with_capacity(n);
    for j in 0..n {
        // Target: e_l -> delta_jl e_1, flattened like the columns.
        let mut rhs = vec![0; n * n];
        rhs[j * n] = 1;
        let lambda = linalg::solve_unique(a.prime(), &m, &rhs).ok_or(Error::NotCentralSimple)?;
        let mut pj = Vec::new();
        for i in 0..n {
            for k in 0..n {
                let c = lambda[i * n + k];
                if c != 0 {
                    pj.push((a.scale(c, &a.basis(i)), a.basis(k)));
                }
            }
        }
        pairs.push(pj);
    }
    Ok(FunctionalRealization { pairs })
}

/// The matrix-unit realization `lambda_(ij)(x) = sum_k E_ki x E_jk` of `M_r`,
/// read in the basis of [`StructureConstantAlgebra::matrix_algebra`].
pub fn matrix_realization(a: &StructureConstantAlgebra) -> Result<FunctionalRealization> {
    let r = a.matrix_size().ok_or_else(|| Error::InvalidAlgebra("not a matrix algebra".into()))?;
    let unit = |i: usize, j: usize| {
        let mut m = vec![vec![0; r]; r];
        m[i][j] = 1;
        a.from_matrix(&m)
    };
    let entry = |i: usize, j: usize| -> Vec<(Vec<u64>, Vec<u64>)> { (0..r).map(|k| (unit(k, i), unit(j, k))).collect() };
    // lambda_1 = m_rr; lambda_(ij) = m_ij - delta_ij m_rr.
    let mut pairs = vec![entry(r - 1, r - 1)];
    for i in 0..r {
        for j in 0..r {
            if (i, j) == (r - 1, r - 1) {
                continue;
            }
            let mut pj = entry(i, j);
            if i == j {
                let neg = a.prime().neg(1);
                pj.extend(entry(r - 1, r - 1).into_iter().map(|(x, y)| (a.scale(neg, &x), y)));
            }
            pairs.push(pj);
        }
    }
    Ok(FunctionalRealization { pairs })
}

/// An automorphism given by the images of the basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CSAutomorphism {
    images: Vec<Vec<u64>>,
}

impl CSAutomorphism {
    pub fn new(alg: &StructureConstantAlgebra, images: Vec<Vec<u64>>) -> Result<Self> {
        let n = alg.dim();
        if images.len() != n || images.iter().any(|v| v.len() != n) {
            return Err(Error::ContextMismatch("need N images of N coordinates".into()));
        }
        let p = alg.prime();
        let images: Vec<Vec<u64>> = images.into_iter().map(|v| v.into_iter().map(|c| p.reduce(c)).collect()).collect();
        if images[0] != alg.one() {
            return Err(Error::RelationViolation("image of e1 is not 1".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = alg.mul(&images[i], &images[j]);
                let rhs = apply_images(alg, &images, &alg.table()[i][j]);
                if lhs != rhs {
                    return Err(Error::RelationViolation(format!("sigma(e{} e{}) != sigma(e{}) sigma(e{})", i + 1, j + 1, i + 1, j + 1)));
                }
            }
        }
        if linalg::rank(p, &images) != n {
            return Err(Error::RelationViolation("basis images are linearly dependent".into()));
        }
        Ok(CSAutomorphism { images })
    }

    pub fn identity(alg: &StructureConstantAlgebra) -> Self {
        CSAutomorphism { images: (0..alg.dim()).map(|i| alg.basis(i)).collect() }
    }

    /// `x -> s x s^{-1}` on a matrix algebra.
    pub fn conjugation(alg: &StructureConstantAlgebra, s: &Matrix) -> Result<Self> {
        let p = alg.prime();
        let sinv = linalg::inverse(p, s).map_err(|_| Error::InvalidConfig("singular conjugating matrix".into()))?;
        let images = (0..alg.dim())
            .map(|i| alg.from_matrix(&linalg::mat_mul(p, &linalg::mat_mul(p, s, &alg.to_matrix(&alg.basis(i))), &sinv)))
            .collect();
        Self::new(alg, images)
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    pub fn apply(&self, alg: &StructureConstantAlgebra, x: &[u64]) -> Vec<u64> {
        apply_images(alg, &self.images, x)
    }

    pub fn is_identity(&self, alg: &StructureConstantAlgebra) -> bool {
        *self == Self::identity(alg)
    }
}

fn apply_images(alg: &StructureConstantAlgebra, images: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
    x.iter().zip(images).fold(vec![0; alg.dim()], |acc, (&c, img)| alg.add(&acc, &alg.scale(c, img)))
}

/// `sigma^{-1}(x) = sum_j lambda'_j(x) e_j` with the twisted functionals
/// `lambda'_j(x) = sum sigma(a) x sigma(b)`.
pub fn invert_csa(
    alg: &StructureConstantAlgebra,
    real: &FunctionalRealization,
    aut: &CSAutomorphism,
) -> Result<CSAutomorphism> {
    let n = alg.dim();
    let twisted = FunctionalRealization {
        pairs: real
            .pairs
            .iter()
            .map(|pj| pj.iter().map(|(a, b)| (aut.apply(alg, a), aut.apply(alg, b))).collect())
            .collect(),
    };
    let failed = || Error::VerificationFailed("input is not an automorphism".into());
    let mut images = Vec::with_capacity(n);
    for l in 0..n {
        let mut img = vec![0; n];
        for (j, slot) in img.iter_mut().enumerate() {
            let v = twisted.evaluate(alg, j, &alg.basis(l));
            if v[1..].iter().any(|&c| c != 0) {
                return Err(failed());
            }
            *slot = v[0];
        }
        images.push(img);
    }
    let tau = CSAutomorphism::new(alg, images).map_err(|_| failed())?;
    for l in 0..n {
        if aut.apply(alg, &tau.apply(alg, &alg.basis(l))) != alg.basis(l) {
            return Err(failed());
        }
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn central_simplicity() {
        assert!(verify_central_simple(&StructureConstantAlgebra::matrix_algebra(pc(5), 2)));
        let f2 = StructureConstantAlgebra::new(pc(2), vec![vec![vec![1]]]).unwrap();
        assert!(verify_central_simple(&f2));
        // F_3 x F_3 with basis 1 = (1,1), f = (1,0): f^2 = f.
        let prod = StructureConstantAlgebra::new(pc(3), vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 1]]]).unwrap();
        assert!(!verify_central_simple(&prod));
        assert_eq!(density_solve(&prod), Err(Error::NotCentralSimple));
    }

    #[test]
    fn realizations_exact() {
        for (p, r) in [(3, 2), (2, 3), (5, 2)] {
            let a = StructureConstantAlgebra::matrix_algebra(pc(p), r);
            assert!(density_solve(&a).unwrap().check(&a));
            assert!(matrix_realization(&a).unwrap().check(&a));
        }
        let f = StructureConstantAlgebra::new(pc(7), vec![vec![vec![1]]]).unwrap();
        assert_eq!(density_solve(&f).unwrap().pairs, vec![vec![(vec![1], vec![1])]]);
    }

    #[test]
    fn conjugation_inverse() {
        let p = pc(5);
        let a = StructureConstantAlgebra::matrix_algebra(p, 2);
        let s = vec![vec![1, 1], vec![0, 1]];
        let sigma = CSAutomorphism::conjugation(&a, &s).unwrap();
        let tau = invert_csa(&a, &density_solve(&a).unwrap(), &sigma).unwrap();
        let e11 = a.from_matrix(&vec![vec![1, 0], vec![0, 0]]);
        assert_eq!(a.to_matrix(&tau.apply(&a, &e11)), vec![vec![1, 1], vec![0, 0]]);
        let e12 = a.from_matrix(&vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(a.to_matrix(&tau.apply(&a, &e12)), vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn non_multiplicative_rejected() {
        let a = StructureConstantAlgebra::matrix_algebra(pc(3), 2);
        let mut imgs: Vec<Vec<u64>> = (0..4).map(|i| a.basis(i)).collect();
        imgs.swap(1, 2);
        assert!(matches!(CSAutomorphism::new(&a, imgs), Err(Error::RelationViolation(_))));
    }
}
