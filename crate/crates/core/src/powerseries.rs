//! Power series `K[[x_1..x_n]]` modulo `m^(D+1)` and inversion of
//! continuous automorphisms.

use std::fmt;

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::multipoly::{CoordinateEngine, MultiPoly, PolyOp};
use crate::primefield::PrimeChar;

/// A series known modulo `m^(D+1)`: every stored term has total degree `<= D`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    poly: MultiPoly,
    bound: u64,
}

impl TruncatedSeries {
    pub fn new(poly: MultiPoly, bound: u64) -> Self {
        TruncatedSeries { poly: poly.truncate(bound), bound }
    }

    pub fn zero(p: PrimeChar, nvars: usize, bound: u64) -> Self {
        Self::new(MultiPoly::zero(p, nvars), bound)
    }

    pub fn one(p: PrimeChar, nvars: usize, bound: u64) -> Self {
        Self::new(MultiPoly::one(p, nvars), bound)
    }

    pub fn var(p: PrimeChar, nvars: usize, i: usize, bound: u64) -> Self {
        Self::new(MultiPoly::var(p, nvars, i), bound)
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn prime(&self) -> PrimeChar {
        self.poly.prime()
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn constant_term(&self) -> u64 {
        self.poly.constant_term()
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        self.poly.coeff(&Monomial::from(exps))
    }

    fn check(&self, other: &TruncatedSeries) -> Result<()> {
        if self.bound != other.bound || !self.poly.same_ring(&other.poly) {
            return Err(Error::ContextMismatch("series with different characteristic, variables or bound".into()));
        }
        Ok(())
    }

    pub fn arith(&self, other: &TruncatedSeries, op: PolyOp) -> Result<TruncatedSeries> {
        self.check(other)?;
        let poly = match op {
            PolyOp::Add => &self.poly + &other.poly,
            PolyOp::Sub => &self.poly - &other.poly,
            PolyOp::Mul => self.poly.mul_truncated(&other.poly, self.bound),
        };
        Ok(TruncatedSeries { poly, bound: self.bound })
    }

    pub fn scale(&self, c: u64) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.scale(c), bound: self.bound }
    }

    pub fn pow(&self, e: u64) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.pow_truncated(e, self.bound), bound: self.bound }
    }

    /// Re-truncates to a smaller bound.
    pub fn truncate(&self, bound: u64) -> TruncatedSeries {
        Self::new(self.poly.clone(), bound.min(self.bound))
    }

    /// `u^{-1}` by the geometric series `c^{-1} sum_k h^k` where `u = c (1 - h)`.
    pub fn unit_inverse(&self) -> Result<TruncatedSeries> {
        let p = self.prime();
        let c = self.constant_term();
        if c == 0 {
            return Err(Error::NotAUnit(format!("{} has zero constant term", self.poly)));
        }
        let cinv = p.inv(c)?;
        let one = MultiPoly::one(p, self.nvars());
        let h = &one - &self.poly.scale(cinv);
        let mut acc = one.clone();
        let mut hk = one;
        for _ in 0..self.bound {
            hk = hk.mul_truncated(&h, self.bound);
            if hk.is_zero() {
                break;
            }
            acc = &acc + &hk;
        }
        Ok(TruncatedSeries { poly: acc.scale(cinv), bound: self.bound })
    }
}

impl From<&TruncatedSeries> for MultiPoly {
    fn from(s: &TruncatedSeries) -> MultiPoly {
        s.poly.clone()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(deg {})", self.poly, self.bound + 1)
    }
}

pub fn series_arith(f: &TruncatedSeries, g: &TruncatedSeries, op: PolyOp) -> Result<TruncatedSeries> {
    f.arith(g, op)
}

pub fn unit_inverse(u: &TruncatedSeries) -> Result<TruncatedSeries> {
    u.unit_inverse()
}

/// A continuous automorphism `x_i -> x'_i` known modulo `m^(D+1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesAutomorphism {
    images: Vec<TruncatedSeries>,
    jacobian_unit_inverse: TruncatedSeries,
    rows: Vec<Vec<MultiPoly>>,
}

impl fmt::Debug for SeriesAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesAutomorphism").field("images", &self.images).finish()
    }
}

impl SeriesAutomorphism {
    pub fn new(images: Vec<TruncatedSeries>) -> Result<Self> {
        let first = images.first().ok_or_else(|| Error::InvalidConfig("an automorphism needs a variable".into()))?;
        let (n, d) = (first.nvars(), first.bound);
        if images.len() != n {
            return Err(Error::ContextMismatch(format!("{} images for {} variables", images.len(), n)));
        }
        for img in &images {
            first.check(img)?;
        }
        for (i, img) in images.iter().enumerate() {
            if img.constant_term() != 0 {
                return Err(Error::NotContinuous(format!("image of x{} has nonzero constant term", i + 1)));
            }
        }
        let polys: Vec<MultiPoly> = images.iter().map(|s| s.poly.clone()).collect();
        let (delta, rows) = crate::multipoly::jacobian_cofactors(&polys, Some(d))?;
        let delta = TruncatedSeries::new(delta, d);
        let jacobian_unit_inverse = delta
            .unit_inverse()
            .map_err(|_| Error::NotAUnit(format!("Jacobian {} is not a unit", delta.poly)))?;
        Ok(SeriesAutomorphism { images, jacobian_unit_inverse, rows })
    }

    pub fn identity(p: PrimeChar, nvars: usize, bound: u64) -> Self {
        Self::new((0..nvars).map(|i| TruncatedSeries::var(p, nvars, i, bound)).collect()).expect("identity")
    }

    pub fn images(&self) -> &[TruncatedSeries] {
        &self.images
    }

    pub fn bound(&self) -> u64 {
        self.images[0].bound
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn prime(&self) -> PrimeChar {
        self.images[0].prime()
    }

    pub fn jacobian_unit_inverse(&self) -> &TruncatedSeries {
        &self.jacobian_unit_inverse
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.prime(), self.nvars(), self.bound())
    }

    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.images[0].check(&TruncatedSeries::zero(f.prime(), f.nvars(), f.bound))?;
        let polys: Vec<MultiPoly> = self.images.iter().map(|s| s.poly.clone()).collect();
        Ok(TruncatedSeries::new(f.poly.substitute_truncated(&polys, self.bound())?, self.bound()))
    }

    /// `self o other`.
    pub fn compose(&self, other: &SeriesAutomorphism) -> Result<SeriesAutomorphism> {
        SeriesAutomorphism::new(other.images.iter().map(|g| self.apply(g)).collect::<Result<Vec<_>>>()?)
    }

    /// Coefficient extraction in the coordinates `x'`, with every product truncated at `D`.
    pub fn engine(&self) -> CoordinateEngine {
        CoordinateEngine::new(
            self.images.iter().map(|s| s.poly.clone()).collect(),
            self.rows.clone(),
            self.jacobian_unit_inverse.poly.clone(),
            Some(self.bound()),
        )
    }

    /// `sigma^{-1}(f)`, i.e. the series `g` with `f = g(x')`.
    pub fn coordinates(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        Ok(TruncatedSeries::new(self.engine().coordinates(&f.poly)?, self.bound()))
    }
}

/// The inverse modulo `m^(D+1)`, verified on generators in both orders.
pub fn invert_series_aut(aut: &SeriesAutomorphism) -> Result<SeriesAutomorphism> {
    let (p, n, d) = (aut.prime(), aut.nvars(), aut.bound());
    let engine = aut.engine();
    let images = (0..n)
        .map(|i| Ok(TruncatedSeries::new(engine.coordinates(&MultiPoly::var(p, n, i))?, d)))
        .collect::<Result<Vec<_>>>()?;
    let tau = SeriesAutomorphism::new(images)?;
    if !aut.compose(&tau)?.is_identity() || !tau.compose(aut)?.is_identity() {
        return Err(Error::VerificationFailed("not an automorphism or insufficient data".into()));
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    fn series(p: u64, d: u64, coeffs: &[u64]) -> TruncatedSeries {
        let p = pc(p);
        let f = MultiPoly::from_terms(p, 1, coeffs.iter().enumerate().map(|(e, &c)| (Monomial::new(vec![e as u32]), c)));
        TruncatedSeries::new(f, d)
    }

    #[test]
    fn arithmetic_examples() {
        let a = series(3, 4, &[1, 1]);
        let b = series(3, 4, &[1, 2]);
        assert_eq!(a.arith(&b, PolyOp::Mul).unwrap(), series(3, 4, &[1, 0, 2]));
        let x = series(3, 4, &[0, 1]);
        assert!(x.pow(4).arith(&x, PolyOp::Mul).unwrap().is_zero());
        let c = series(2, 3, &[1, 1, 1]);
        assert_eq!(c.pow(2), series(2, 3, &[1, 0, 1]));
        assert!(a.arith(&series(3, 5, &[1]), PolyOp::Add).is_err());
    }

    #[test]
    fn unit_inverse_examples() {
        assert_eq!(series(5, 3, &[2]).unit_inverse().unwrap(), series(5, 3, &[3]));
        assert_eq!(series(7, 3, &[1, 6]).unit_inverse().unwrap(), series(7, 3, &[1, 1, 1, 1]));
        assert_eq!(series(5, 2, &[1, 2]).unit_inverse().unwrap(), series(5, 2, &[1, 3, 4]));
        assert!(matches!(series(5, 2, &[0, 1]).unit_inverse(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn inverse_examples() {
        let s = SeriesAutomorphism::new(vec![series(5, 3, &[0, 1, 1])]).unwrap();
        let t = invert_series_aut(&s).unwrap();
        assert_eq!(t.images()[0], series(5, 3, &[0, 1, 4, 2]));
        let id = SeriesAutomorphism::identity(pc(3), 2, 5);
        assert!(invert_series_aut(&id).unwrap().is_identity());
        let bad = SeriesAutomorphism::new(vec![series(5, 3, &[0, 0, 1])]);
        assert!(matches!(bad, Err(Error::NotAUnit(ref m)) if m.contains("Jacobian")));
        let shifted = SeriesAutomorphism::new(vec![series(5, 3, &[1, 1])]);
        assert!(matches!(shifted, Err(Error::NotContinuous(_))));
    }

    #[test]
    fn non_scalar_jacobian_allowed() {
        // x -> x + x^2 has Jacobian 1 + 2x, a unit but not a scalar.
        for p in [2, 3, 5] {
            for d in 1..9 {
                let s = SeriesAutomorphism::new(vec![series(p, d, &[0, 1, 1])]).unwrap();
                let t = invert_series_aut(&s).unwrap();
                assert!(s.compose(&t).unwrap().is_identity());
            }
        }
    }
}
