//! Automorphisms of `P_n` and their inversion through coordinates in the
//! image system `x'_i = sigma(x_i)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::monomial::{add_term, Monomial, Terms};
use crate::primefield::{FpScalar, PrimeChar};

use super::MultiPoly;

/// Default bound on the number of Frobenius levels in coefficient extraction.
pub const DEFAULT_MAX_DEPTH: usize = 64;

const MAX_TERMS: usize = 1 << 20;

/// A polynomial endomorphism `x_i -> x'_i` with scalar nonzero Jacobian,
/// together with the cofactor rows of the dual derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyAutomorphism {
    p: PrimeChar,
    nvars: usize,
    images: Vec<MultiPoly>,
    jacobian: MultiPoly,
    cofactor_rows: Vec<Vec<MultiPoly>>,
}

impl PolyAutomorphism {
    /// Validates the Jacobian condition and `d'_i(x'_j) = delta_ij`.
    pub fn new(images: Vec<MultiPoly>) -> Result<Self> {
        let (p, nvars) = ring_of(&images)?;
        let (jacobian, cofactor_rows) = cofactor_derivations(&images)?;
        let aut = PolyAutomorphism { p, nvars, images, jacobian, cofactor_rows };
        for i in 0..nvars {
            for j in 0..nvars {
                let v = aut.dual_derivation(i, &aut.images[j]);
                let expected = MultiPoly::constant(p, nvars, u64::from(i == j));
                if v != expected {
                    return Err(Error::InvariantViolation(format!(
                        "dual derivation {} does not act as delta on image {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(aut)
    }

    pub fn identity(p: PrimeChar, nvars: usize) -> Self {
        let images = (0..nvars).map(|i| MultiPoly::var(p, nvars, i)).collect();
        Self::new(images).expect("identity is an automorphism")
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn jacobian(&self) -> &MultiPoly {
        &self.jacobian
    }

    pub fn cofactor_rows(&self) -> &[Vec<MultiPoly>] {
        &self.cofactor_rows
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, f)| *f == MultiPoly::var(self.p, self.nvars, i))
    }

    /// `d'_j(f) = Delta^{-1} sum_l c_{jl} d_l(f)`.
    pub fn dual_derivation(&self, j: usize, f: &MultiPoly) -> MultiPoly {
        let dinv = self.p.inv(self.jacobian.constant_term()).expect("validated Jacobian");
        let mut acc = MultiPoly::zero(self.p, self.nvars);
        for (l, c) in self.cofactor_rows[j].iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(c * &f.derivative(l));
            }
        }
        acc.scale(dinv)
    }

    /// `sigma(f) = f(x'_1, ..., x'_n)`.
    pub fn apply(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if !f.same_ring(&self.images[0]) && self.nvars > 0 {
            return Err(Error::ContextMismatch("polynomial and automorphism rings differ".into()));
        }
        f.substitute(&self.images)
    }

    /// `self o other`, i.e. `x_i -> self(other(x_i))`.
    pub fn compose(&self, other: &PolyAutomorphism) -> Result<PolyAutomorphism> {
        if self.p != other.p || self.nvars != other.nvars {
            return Err(Error::ContextMismatch("composing automorphisms of different rings".into()));
        }
        let images = other.images.iter().map(|g| self.apply(g)).collect::<Result<Vec<_>>>()?;
        PolyAutomorphism::new(images)
    }

    pub fn engine(&self) -> CoordinateEngine {
        let dinv = self.p.inv(self.jacobian.constant_term()).expect("validated Jacobian");
        CoordinateEngine::new(
            self.images.clone(),
            self.cofactor_rows.clone(),
            MultiPoly::constant(self.p, self.nvars, dinv),
            None,
        )
    }

    /// The polynomial `g` with `f = g(x'_1, ..., x'_n)`, i.e. `sigma^{-1}(f)`.
    pub fn coordinates(&self, f: &MultiPoly) -> Result<MultiPoly> {
        self.engine().coordinates(f)
    }
}

fn ring_of(images: &[MultiPoly]) -> Result<(PrimeChar, usize)> {
    let first = images
        .first()
        .ok_or_else(|| Error::InvalidConfig("an automorphism needs at least one variable".into()))?;
    let (p, n) = (first.prime(), first.nvars());
    if images.len() != n {
        return Err(Error::ContextMismatch(format!("{} images for {} variables", images.len(), n)));
    }
    if images.iter().any(|f| !f.same_ring(first)) {
        return Err(Error::ContextMismatch("images live in different rings".into()));
    }
    Ok((p, n))
}

fn minor(mat: &[Vec<MultiPoly>], row: usize, col: usize) -> Vec<Vec<MultiPoly>> {
    mat.iter()
        .enumerate()
        .filter(|(r, _)| *r != row)
        .map(|(_, v)| v.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Determinant by Laplace expansion along the first row, truncating products
/// above `bound` when given.
fn det(mat: &[Vec<MultiPoly>], p: PrimeChar, nvars: usize, bound: Option<u64>) -> MultiPoly {
    let mul = |a: &MultiPoly, b: &MultiPoly| match bound {
        Some(d) => a.mul_truncated(b, d),
        None => a * b,
    };
    match mat.len() {
        0 => MultiPoly::one(p, nvars),
        1 => mat[0][0].clone(),
        n => {
            let mut acc = MultiPoly::zero(p, nvars);
            for c in 0..n {
                if mat[0][c].is_zero() {
                    continue;
                }
                let term = mul(&mat[0][c], &det(&minor(mat, 0, c), p, nvars, bound));
                acc = &acc + &term.scale(p.sign(c as u64));
            }
            acc
        }
    }
}

/// Jacobian determinant and cofactor matrix, without any condition on the determinant.
pub(crate) fn jacobian_cofactors(images: &[MultiPoly], bound: Option<u64>) -> Result<(MultiPoly, Vec<Vec<MultiPoly>>)> {
    let (p, n) = ring_of(images)?;
    let jac: Vec<Vec<MultiPoly>> = images.iter().map(|f| (0..n).map(|l| f.derivative(l)).collect()).collect();
    let delta = det(&jac, p, n, bound);
    let rows = (0..n)
        .map(|j| (0..n).map(|l| det(&minor(&jac, j, l), p, n, bound).scale(p.sign((j + l) as u64))).collect())
        .collect();
    Ok((delta, rows))
}

/// The Jacobian `Delta = det(d x'_i / d x_j)` and rows `c_j` with
/// `d'_j = Delta^{-1} sum_l c_{jl} d_l`, from the cofactor expansion of the
/// determinant along a row of operators.
pub fn cofactor_derivations(images: &[MultiPoly]) -> Result<(MultiPoly, Vec<Vec<MultiPoly>>)> {
    let (delta, rows) = jacobian_cofactors(images, None)?;
    if !delta.is_constant() || delta.is_zero() {
        return Err(Error::NonScalarJacobian);
    }
    Ok((delta, rows))
}

/// The system `w_i -> Fr(x'_i)` read in the variables `w = x^p`.
pub fn frobenius_twist(aut: &PolyAutomorphism) -> Result<PolyAutomorphism> {
    let images = aut
        .images
        .iter()
        .map(|f| f.frobenius().defrobenius().expect("Frobenius image has p-divisible exponents"))
        .collect();
    PolyAutomorphism::new(images)
}

/// The coefficients `c_gamma` with `f = sum c_gamma (x')^gamma`.
pub fn new_coordinate_coefficients(aut: &PolyAutomorphism, f: &MultiPoly) -> Result<BTreeMap<Monomial, FpScalar>> {
    let g = aut.coordinates(f)?;
    let p = g.prime();
    Ok(g.into_terms().into_iter().map(|(m, c)| (m, FpScalar::from_residue(c, p))).collect())
}

/// `sigma^{-1}(x_i) = sum_gamma c_gamma x^gamma`, checked by `sigma(sigma^{-1}(x_i)) = x_i`.
pub fn invert_poly_aut(aut: &PolyAutomorphism) -> Result<PolyAutomorphism> {
    let engine = aut.engine();
    let mut images = Vec::with_capacity(aut.nvars);
    for i in 0..aut.nvars {
        let xi = MultiPoly::var(aut.p, aut.nvars, i);
        let t = engine.coordinates(&xi)?;
        if aut.apply(&t)? != xi {
            return Err(Error::NotAutomorphism(format!("composite fails to fix x{}", i + 1)));
        }
        images.push(t);
    }
    PolyAutomorphism::new(images)
}

/// Coefficient extraction in the coordinate system `x'`.
///
/// Each level splits an input along every variable into
/// `f = sum_{j < p} (x')^j g_j` with `g_j` killed by all `d'_i`, then
/// recurses on `g_j` read as a polynomial in `w = x^p`. With a truncation
/// bound the inputs are series known modulo `m^(D+1)` and the precision of
/// each piece is tracked.
#[derive(Clone, Debug)]
pub struct CoordinateEngine {
    p: PrimeChar,
    nvars: usize,
    images: Vec<MultiPoly>,
    rows: Vec<Vec<MultiPoly>>,
    delta_inv: MultiPoly,
    bound: Option<u64>,
    max_depth: usize,
    image_powers: Vec<Vec<MultiPoly>>,
}

impl CoordinateEngine {
    pub(crate) fn new(
        images: Vec<MultiPoly>,
        rows: Vec<Vec<MultiPoly>>,
        delta_inv: MultiPoly,
        bound: Option<u64>,
    ) -> Self {
        let (p, nvars) = (images[0].prime(), images[0].nvars());
        let image_powers = images
            .iter()
            .map(|x| {
                let mut pw = vec![MultiPoly::one(p, nvars)];
                for _ in 1..p.get() {
                    let next = match bound {
                        Some(d) => pw.last().unwrap().mul_truncated(x, d),
                        None => pw.last().unwrap() * x,
                    };
                    pw.push(next);
                }
                pw
            })
            .collect();
        CoordinateEngine { p, nvars, images, rows, delta_inv, bound, max_depth: DEFAULT_MAX_DEPTH, image_powers }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly, prec: Option<i64>) -> MultiPoly {
        match prec {
            Some(e) => a.mul_truncated(b, e.max(0) as u64),
            None => a * b,
        }
    }

    fn derive(&self, j: usize, f: &MultiPoly, prec: Option<i64>) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.p, self.nvars);
        for (l, c) in self.rows[j].iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &self.mul(c, &f.derivative(l), prec);
            }
        }
        self.mul(&self.delta_inv, &acc, prec)
    }

    /// `F_m = sum_r (-1)^r C(m+r, r) (x'_i)^r d'^[m+r]_i(f)` for `m < p`, each
    /// with its precision `prec - m`.
    fn split(&self, i: usize, f: &MultiPoly, prec: Option<i64>) -> Vec<(MultiPoly, Option<i64>)> {
        let p = self.p;
        let pu = p.get() as usize;
        let mut ders = Vec::with_capacity(pu);
        ders.push(f.clone());
        for k in 1..pu {
            let kp = prec.map(|e| e - k as i64);
            if kp.is_some_and(|e| e < 0) || ders[k - 1].is_zero() {
                ders.push(MultiPoly::zero(p, self.nvars));
                continue;
            }
            let d = self.derive(i, &ders[k - 1], kp);
            ders.push(d.scale(p.inv(k as u64).expect("k < p")));
        }
        (0..pu)
            .map(|m| {
                let mp = prec.map(|e| e - m as i64);
                let mut acc = MultiPoly::zero(p, self.nvars);
                if mp.is_none_or(|e| e >= 0) {
                    for r in 0..pu - m {
                        if ders[m + r].is_zero() {
                            continue;
                        }
                        let c = p.mul(p.sign(r as u64), p.binom((m + r) as u64, r as u64));
                        acc = &acc + &self.mul(&self.image_powers[i][r], &ders[m + r], mp).scale(c);
                    }
                }
                (acc, mp)
            })
            .collect()
    }

    /// `sum_gamma c_gamma x^gamma` where `f = sum_gamma c_gamma (x')^gamma`.
    pub fn coordinates(&self, f: &MultiPoly) -> Result<MultiPoly> {
        let prec = self.bound.map(|d| d as i64);
        let f = match self.bound {
            Some(d) => f.truncate(d),
            None => f.clone(),
        };
        let terms = self.level(&f, prec, 0)?;
        Ok(MultiPoly::from_canonical(self.p, self.nvars, terms))
    }

    fn level(&self, f: &MultiPoly, prec: Option<i64>, depth: usize) -> Result<Terms> {
        if f.is_zero() || prec.is_some_and(|e| e < 0) {
            return Ok(Terms::new());
        }
        if f.is_constant() {
            let mut t = Terms::new();
            t.insert(Monomial::zero(self.nvars), f.constant_term());
            return Ok(t);
        }
        if depth >= self.max_depth {
            return Err(Error::DepthExceeded(self.max_depth));
        }
        let mut pieces = vec![(vec![0u32; self.nvars], f.clone(), prec)];
        for i in 0..self.nvars {
            let mut next = Vec::new();
            for (j, g, gp) in pieces {
                if g.is_zero() {
                    continue;
                }
                for (m, (h, hp)) in self.split(i, &g, gp).into_iter().enumerate() {
                    if h.len() > MAX_TERMS {
                        return Err(Error::ResourceBound(format!("intermediate polynomial exceeds {MAX_TERMS} terms")));
                    }
                    if !h.is_zero() {
                        let mut j = j.clone();
                        j[i] = m as u32;
                        next.push((j, h, hp));
                    }
                }
            }
            pieces = next;
        }
        let pu = self.p.get();
        let mut out = Terms::new();
        for (j, g, gp) in pieces {
            let g = match gp {
                Some(e) => g.truncate(e as u64),
                None => g,
            };
            let w = g.defrobenius().ok_or(Error::NotPthPower { level: depth })?;
            let wp = gp.map(|e| e.div_euclid(pu as i64));
            for (m, c) in self.level(&w, wp, depth + 1)? {
                let gamma: Vec<u32> = m.exps().iter().zip(&j).map(|(&e, &ji)| ji + pu as u32 * e).collect();
                add_term(&mut out, self.p, Monomial::new(gamma), c);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    fn shear() -> (Vec<MultiPoly>, MultiPoly, MultiPoly) {
        let p = pc(3);
        let x1 = MultiPoly::var(p, 2, 0);
        let x2 = MultiPoly::var(p, 2, 1);
        (vec![x1.clone(), &x2 + &x1.pow(2)], x1, x2)
    }

    #[test]
    fn cofactors_of_shear() {
        let (img, x1, _) = shear();
        let p = pc(3);
        let (delta, rows) = cofactor_derivations(&img).unwrap();
        assert_eq!(delta, MultiPoly::one(p, 2));
        assert_eq!(rows[0], vec![MultiPoly::one(p, 2), x1.clone()]);
        assert_eq!(rows[1], vec![MultiPoly::zero(p, 2), MultiPoly::one(p, 2)]);
    }

    #[test]
    fn cofactors_of_scaling() {
        let p = pc(5);
        let aut = PolyAutomorphism::new(vec![MultiPoly::var(p, 1, 0).scale(2)]).unwrap();
        assert_eq!(aut.jacobian().constant_term(), 2);
        let d = aut.dual_derivation(0, &MultiPoly::var(p, 1, 0));
        assert_eq!(d, MultiPoly::constant(p, 1, 3));
    }

    #[test]
    fn non_scalar_jacobian_rejected() {
        let p = pc(5);
        let r = PolyAutomorphism::new(vec![MultiPoly::var(p, 1, 0).pow(2)]);
        assert_eq!(r.unwrap_err(), Error::NonScalarJacobian);
    }

    #[test]
    fn twist_examples() {
        let (img, x1, x2) = shear();
        let aut = PolyAutomorphism::new(img.clone()).unwrap();
        assert_eq!(frobenius_twist(&aut).unwrap().images(), &img[..]);
        let p = pc(2);
        let (y1, y2) = (MultiPoly::var(p, 2, 0), MultiPoly::var(p, 2, 1));
        let aut = PolyAutomorphism::new(vec![&y1 + &y2, y2.clone()]).unwrap();
        assert_eq!(frobenius_twist(&aut).unwrap().images(), aut.images());
        let _ = (x1, x2);
    }

    #[test]
    fn coordinates_of_shear() {
        let (img, x1, x2) = shear();
        let aut = PolyAutomorphism::new(img).unwrap();
        let c = new_coordinate_coefficients(&aut, &x2).unwrap();
        let got: Vec<(Vec<u32>, u64)> = c.iter().map(|(m, s)| (m.exps().to_vec(), s.value())).collect();
        assert_eq!(got, vec![(vec![0, 1], 1), (vec![2, 0], 2)]);
        let k = MultiPoly::constant(pc(3), 2, 2);
        assert_eq!(aut.coordinates(&k).unwrap(), k);
        assert_eq!(aut.coordinates(&x1).unwrap(), x1);
    }

    #[test]
    fn invert_examples() {
        let (img, x1, x2) = shear();
        let inv = invert_poly_aut(&PolyAutomorphism::new(img).unwrap()).unwrap();
        assert_eq!(inv.images(), &[x1.clone(), &x2 + &x1.pow(2).scale(2)][..]);

        let p = pc(5);
        let (y1, y2) = (MultiPoly::var(p, 2, 0), MultiPoly::var(p, 2, 1));
        let lin = PolyAutomorphism::new(vec![&y1.scale(2) + &y2, y1.clone()]).unwrap();
        let inv = invert_poly_aut(&lin).unwrap();
        assert_eq!(inv.images(), &[y2.clone(), &y1 + &y2.scale(3)][..]);
        assert!(lin.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&lin).unwrap().is_identity());
        assert!(invert_poly_aut(&PolyAutomorphism::identity(p, 3)).unwrap().is_identity());
    }

    #[test]
    fn non_automorphism_with_unit_jacobian_fails_loudly() {
        // x -> x + x^p has Jacobian 1 but is not surjective.
        let p = pc(3);
        let x = MultiPoly::var(p, 1, 0);
        let aut = PolyAutomorphism::new(vec![&x + &x.pow(3)]).unwrap();
        let err = invert_poly_aut(&aut).unwrap_err();
        assert!(matches!(err, Error::DepthExceeded(_) | Error::NotPthPower { .. } | Error::NotAutomorphism(_)));
    }

    #[test]
    fn high_degree_triangular() {
        let p = pc(2);
        let v: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::var(p, 3, i)).collect();
        let img = vec![
            v[0].clone(),
            &v[1] + &v[0].pow(3),
            &(&v[2] + &(&v[0] * &v[1]).pow(2)) + &v[1].pow(4),
        ];
        let aut = PolyAutomorphism::new(img).unwrap();
        let inv = invert_poly_aut(&aut).unwrap();
        assert!(aut.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&aut).unwrap().is_identity());
    }
}
