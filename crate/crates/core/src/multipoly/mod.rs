//! Sparse multivariate polynomials over F_p.

mod automorphism;

pub use automorphism::{
    cofactor_derivations, frobenius_twist, invert_poly_aut, new_coordinate_coefficients, CoordinateEngine,
    PolyAutomorphism, DEFAULT_MAX_DEPTH,
};
pub(crate) use automorphism::jacobian_cofactors;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::descent::Algebra;
use crate::error::{Error, Result};
use crate::monomial::{add_term, add_terms, scale_terms, sub_terms, Monomial, Terms};
use crate::primefield::{FpScalar, PrimeChar};

/// `sum c_alpha x^alpha` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    p: PrimeChar,
    nvars: usize,
    terms: Terms,
}

/// Ring operations accepted by [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

impl MultiPoly {
    pub fn zero(p: PrimeChar, nvars: usize) -> Self {
        MultiPoly { p, nvars, terms: Terms::new() }
    }

    pub fn one(p: PrimeChar, nvars: usize) -> Self {
        Self::constant(p, nvars, 1)
    }

    /// The constant `c` (a residue, reduced mod p).
    pub fn constant(p: PrimeChar, nvars: usize, c: u64) -> Self {
        Self::monomial(p, Monomial::zero(nvars), c)
    }

    /// The variable `x_{i+1}` (zero-based index).
    pub fn var(p: PrimeChar, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        Self::monomial(p, Monomial::unit(nvars, i, 1), 1)
    }

    pub fn monomial(p: PrimeChar, m: Monomial, c: u64) -> Self {
        let nvars = m.len();
        let mut terms = Terms::new();
        add_term(&mut terms, p, m, p.reduce(c));
        MultiPoly { p, nvars, terms }
    }

    /// Builds a polynomial from arbitrary (unreduced, possibly repeated) terms.
    pub fn from_terms(p: PrimeChar, nvars: usize, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut out = Terms::new();
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "exponent vector length");
            add_term(&mut out, p, m, p.reduce(c));
        }
        MultiPoly { p, nvars, terms: out }
    }

    pub(crate) fn from_canonical(p: PrimeChar, nvars: usize, terms: Terms) -> Self {
        debug_assert!(terms.values().all(|&c| c != 0 && c < p.get()));
        MultiPoly { p, nvars, terms }
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn coeff_scalar(&self, m: &Monomial) -> FpScalar {
        FpScalar::from_residue(self.coeff(m), self.p)
    }

    pub fn constant_term(&self) -> u64 {
        self.coeff(&Monomial::zero(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest total degree of a term; `None` for zero.
    pub fn order(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn same_ring(&self, other: &MultiPoly) -> bool {
        self.p == other.p && self.nvars == other.nvars
    }

    fn check_ring(&self, other: &MultiPoly) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "polynomials over (p={}, n={}) and (p={}, n={})",
                self.p, self.nvars, other.p, other.nvars
            )))
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        Ok(MultiPoly { terms: add_terms(&self.terms, &other.terms, self.p), ..self.empty_like() })
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        Ok(MultiPoly { terms: sub_terms(&self.terms, &other.terms, self.p), ..self.empty_like() })
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        Ok(self.mul_bounded(other, None))
    }

    fn empty_like(&self) -> MultiPoly {
        MultiPoly::zero(self.p, self.nvars)
    }

    /// Product keeping only terms of total degree `<= bound`.
    pub fn mul_truncated(&self, other: &MultiPoly, bound: u64) -> MultiPoly {
        self.mul_bounded(other, Some(bound))
    }

    fn mul_bounded(&self, other: &MultiPoly, bound: Option<u64>) -> MultiPoly {
        debug_assert!(self.same_ring(other));
        let p = self.p;
        let mut out = Terms::new();
        for (ma, &ca) in &self.terms {
            let da = ma.degree();
            for (mb, &cb) in &other.terms {
                if bound.is_some_and(|b| da + mb.degree() > b) {
                    continue;
                }
                add_term(&mut out, p, ma.add(mb), p.mul(ca, cb));
            }
        }
        MultiPoly { terms: out, ..self.empty_like() }
    }

    /// Multiplication by a residue.
    pub fn scale(&self, c: u64) -> MultiPoly {
        MultiPoly { terms: scale_terms(&self.terms, self.p.reduce(c), self.p), ..self.empty_like() }
    }

    pub fn pow(&self, e: u64) -> MultiPoly {
        self.pow_bounded(e, None)
    }

    pub fn pow_truncated(&self, e: u64, bound: u64) -> MultiPoly {
        self.pow_bounded(e, Some(bound))
    }

    fn pow_bounded(&self, mut e: u64, bound: Option<u64>) -> MultiPoly {
        let mut acc = MultiPoly::one(self.p, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_bounded(&base, bound);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_bounded(&base, bound);
            }
        }
        acc
    }

    /// Drops every term of total degree above `bound`.
    pub fn truncate(&self, bound: u64) -> MultiPoly {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() <= bound).map(|(m, &c)| (m.clone(), c)).collect();
        MultiPoly { terms, ..self.empty_like() }
    }

    /// The divided-power operator `d^[alpha]`, acting by
    /// `x^beta -> C(beta, alpha) x^(beta - alpha)`.
    pub fn divided_derivative(&self, alpha: &[u32]) -> MultiPoly {
        assert_eq!(alpha.len(), self.nvars, "multi-index length");
        let p = self.p;
        let alpha = Monomial::from(alpha);
        let mut out = Terms::new();
        for (m, &c) in &self.terms {
            if let Some(rest) = m.checked_sub(&alpha) {
                add_term(&mut out, p, rest, p.mul(c, p.binom_vec(m.exps(), alpha.exps())));
            }
        }
        MultiPoly { terms: out, ..self.empty_like() }
    }

    /// The ordinary partial derivative in the variable with zero-based index `i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        self.divided_derivative(Monomial::unit(self.nvars, i, 1).exps())
    }

    /// Substitutes `images[i]` for `x_{i+1}`; the result lives in the ring of the images.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        self.substitute_bounded(images, None)
    }

    /// Substitution keeping only terms of total degree `<= bound`.
    pub fn substitute_truncated(&self, images: &[MultiPoly], bound: u64) -> Result<MultiPoly> {
        self.substitute_bounded(images, Some(bound))
    }

    fn substitute_bounded(&self, images: &[MultiPoly], bound: Option<u64>) -> Result<MultiPoly> {
        if images.len() != self.nvars {
            return Err(Error::ContextMismatch(format!(
                "{} images supplied for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        let (p, target_n) = (first.p, first.nvars);
        for img in images {
            first.check_ring(img)?;
        }
        if p != self.p {
            return Err(Error::CharMismatch(self.p.get(), p.get()));
        }
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|_| vec![MultiPoly::one(p, target_n)]).collect();
        let mut acc = MultiPoly::zero(p, target_n);
        for (m, &c) in &self.terms {
            let mut t = MultiPoly::constant(p, target_n, c);
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_bounded(&images[i], bound);
                    powers[i].push(next);
                }
                t = t.mul_bounded(&powers[i][e as usize], bound);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `x^alpha -> x^(p alpha)`; scalars in F_p are Frobenius-fixed.
    pub fn frobenius(&self) -> MultiPoly {
        let p = self.p.get() as u32;
        let terms = self.terms.iter().map(|(m, &c)| (m.scale(p), c)).collect();
        MultiPoly { terms, ..self.empty_like() }
    }

    /// Inverse of [`MultiPoly::frobenius`]; `None` unless every exponent is divisible by p.
    pub fn defrobenius(&self) -> Option<MultiPoly> {
        let p = self.p.get() as u32;
        let mut terms = Terms::new();
        for (m, &c) in &self.terms {
            if m.exps().iter().any(|e| e % p != 0) {
                return None;
            }
            terms.insert(Monomial::new(m.exps().iter().map(|e| e / p).collect()), c);
        }
        Some(MultiPoly { terms, ..self.empty_like() })
    }

    /// Reinterprets the polynomial in a ring with more variables, placing the
    /// current ones at positions `offset..offset + nvars`.
    pub fn embed(&self, nvars: usize, offset: usize) -> MultiPoly {
        assert!(offset + self.nvars <= nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| {
                let mut v = vec![0; nvars];
                v[offset..offset + self.nvars].copy_from_slice(m.exps());
                (Monomial::new(v), c)
            })
            .collect();
        MultiPoly { p: self.p, nvars, terms }
    }

    /// Renders with the given variable names (`names[i]` for index `i`).
    pub fn render_with(&self, names: &dyn Fn(usize) -> String) -> String {
        crate::cli::render::render_terms(self.terms.iter().map(|(m, &c)| (c, monomial_factors(m, names))))
    }
}

fn monomial_factors(m: &Monomial, names: &dyn Fn(usize) -> String) -> Vec<String> {
    m.exps()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { names(i) } else { format!("{}^{}", names(i), e) })
        .collect()
}

/// Checked ring operation.
pub fn poly_arith(f: &MultiPoly, g: &MultiPoly, op: PolyOp) -> Result<MultiPoly> {
    match op {
        PolyOp::Add => f.checked_add(g),
        PolyOp::Sub => f.checked_sub(g),
        PolyOp::Mul => f.checked_mul(g),
    }
}

/// Panics on mismatched rings; use [`poly_arith`] for the checked form.
impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial ring mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(self.p.neg(1))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|i| format!("x{}", i + 1)))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly(p={}, n={}: {})", self.p, self.nvars, self)
    }
}

/// `P_n` as an [`Algebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub p: PrimeChar,
    pub nvars: usize,
}

impl PolyRing {
    pub fn new(p: PrimeChar, nvars: usize) -> Self {
        PolyRing { p, nvars }
    }

    pub fn var(&self, i: usize) -> MultiPoly {
        MultiPoly::var(self.p, self.nvars, i)
    }

    /// The divided power `x_i^j / j!` for `j < p`.
    pub fn divided_var_power(&self, i: usize, j: usize) -> Result<MultiPoly> {
        Ok(self.var(i).pow(j as u64).scale(self.p.factorial_inv(j as u64)?))
    }
}

impl Algebra for PolyRing {
    type Elem = MultiPoly;

    fn prime(&self) -> PrimeChar {
        self.p
    }
    fn zero(&self) -> MultiPoly {
        MultiPoly::zero(self.p, self.nvars)
    }
    fn one(&self) -> MultiPoly {
        MultiPoly::one(self.p, self.nvars)
    }
    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a + b
    }
    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a - b
    }
    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a * b
    }
    fn scale(&self, c: u64, a: &MultiPoly) -> MultiPoly {
        a.scale(c)
    }
    fn is_zero(&self, a: &MultiPoly) -> bool {
        a.is_zero()
    }
    fn commutator(&self, _a: &MultiPoly, _b: &MultiPoly) -> MultiPoly {
        self.zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    fn x(p: u64, n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(pc(p), n, i)
    }

    #[test]
    fn freshmans_dream_char_two() {
        let s = &x(2, 2, 0) + &x(2, 2, 1);
        assert_eq!(&s * &s, &x(2, 2, 0).pow(2) + &x(2, 2, 1).pow(2));
    }

    #[test]
    fn product_over_f3() {
        let p = pc(3);
        let a = &x(3, 1, 0) + &MultiPoly::constant(p, 1, 1);
        let b = &x(3, 1, 0) + &MultiPoly::constant(p, 1, 2);
        assert_eq!(&a * &b, &x(3, 1, 0).pow(2) + &MultiPoly::constant(p, 1, 2));
        assert_eq!(&a * &MultiPoly::one(p, 1), a);
    }

    #[test]
    fn mismatched_rings_rejected() {
        let r = poly_arith(&x(3, 1, 0), &x(3, 2, 0), PolyOp::Add);
        assert!(matches!(r, Err(Error::ContextMismatch(_))));
        let r = poly_arith(&x(3, 1, 0), &x(5, 1, 0), PolyOp::Mul);
        assert!(matches!(r, Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn divided_derivative_examples() {
        let f = x(5, 1, 0).pow(3);
        assert_eq!(f.divided_derivative(&[2]), x(5, 1, 0).scale(3));
        assert_eq!(f.divided_derivative(&[0]), f);
        for p in [2, 3, 5, 7] {
            let f = x(p, 1, 0).pow(p);
            assert_eq!(f.divided_derivative(&[p as u32]), MultiPoly::one(pc(p), 1));
            assert!(f.derivative(0).is_zero());
        }
    }

    #[test]
    fn substitution_squares_image() {
        let p = pc(3);
        let (x1, x2) = (x(3, 2, 0), x(3, 2, 1));
        let img = vec![x1.clone(), &x2 + &x1.pow(2)];
        let f = x2.pow(2).substitute(&img).unwrap();
        let expected = &(&x2.pow(2) + &(&x1.pow(2) * &x2).scale(2)) + &x1.pow(4);
        assert_eq!(f, expected);
        assert_eq!(MultiPoly::constant(p, 2, 2).substitute(&img).unwrap(), MultiPoly::constant(p, 2, 2));
    }

    #[test]
    fn frobenius_round_trip() {
        let f = &(&x(3, 2, 0) * &x(3, 2, 1)).scale(2) + &MultiPoly::one(pc(3), 2);
        let fr = f.frobenius();
        assert_eq!(fr, f.pow(3));
        assert_eq!(fr.defrobenius().unwrap(), f);
        assert!(f.defrobenius().is_none());
    }

    #[test]
    fn truncated_products() {
        let f = &MultiPoly::one(pc(5), 1) + &x(5, 1, 0);
        assert_eq!(f.pow_truncated(4, 1), &MultiPoly::one(pc(5), 1) + &x(5, 1, 0).scale(4));
        assert_eq!(f.pow(4).truncate(1), f.pow_truncated(4, 1));
    }

    #[test]
    fn display_is_graded_lex() {
        let f = &(&x(5, 2, 1).pow(2) + &x(5, 2, 0).scale(3)) + &MultiPoly::constant(pc(5), 2, 7);
        assert_eq!(f.to_string(), "2 + 3*x1 + x2^2");
        assert_eq!(MultiPoly::zero(pc(5), 2).to_string(), "0");
    }
}
