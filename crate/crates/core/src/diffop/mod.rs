//! Differential operators with divided powers: `D(P_n)`, its coefficient
//! extension `D(P_n) (x) P_m`, and the truncations `T_k (x) P_m`.
//!
//! Elements are stored in x-left normal order `sum c x^alpha d^[beta] y^gamma`,
//! keyed by the concatenated exponent vector `[alpha, beta, gamma]`.

mod automorphism;
mod inverse;
mod projection;

pub use automorphism::{composite_divided_power, DiffOpAutomorphism};
pub use inverse::invert_diffop_aut;
pub use projection::{proj_to_scalars, reassemble_taylor, taylor_diffop, DiffOpFrame, Side, TaylorCoefficients};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::descent::Algebra;
use crate::error::{Error, Result};
use crate::monomial::{add_term, add_terms, scale_terms, sub_terms, Monomial, Terms};
use crate::multipoly::MultiPoly;
use crate::primefield::PrimeChar;

/// Shape of a differential-operator algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOpContext {
    pub p: PrimeChar,
    pub nx: usize,
    pub ny: usize,
    /// `Some(k)` for `T_k`: divided powers `d_i^[j]` with `j < p^(k_i)` only.
    pub order_bound: Option<Vec<u32>>,
}

/// Shared handle on a [`DiffOpContext`]; acts as the [`Algebra`].
#[derive(Clone, Debug)]
pub struct DiffOpRing(Arc<DiffOpContext>);

impl PartialEq for DiffOpRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for DiffOpRing {}

impl DiffOpRing {
    pub fn new(p: PrimeChar, nx: usize, ny: usize, order_bound: Option<Vec<u32>>) -> Result<Self> {
        if let Some(k) = &order_bound {
            if k.len() != nx {
                return Err(Error::InvalidConfig(format!("k-vector has {} entries for n = {}", k.len(), nx)));
            }
            if k.contains(&0) {
                return Err(Error::InvalidConfig("every entry of the k-vector must be at least 1".into()));
            }
            if k.iter().any(|&ki| p.get().checked_pow(ki).is_none_or(|v| v > u32::MAX as u64)) {
                return Err(Error::InvalidConfig("p^k exceeds the supported exponent range".into()));
            }
        }
        Ok(DiffOpRing(Arc::new(DiffOpContext { p, nx, ny, order_bound })))
    }

    /// `D(P_n)`.
    pub fn plain(p: PrimeChar, nx: usize) -> Self {
        Self::new(p, nx, 0, None).expect("no order bound")
    }

    pub fn context(&self) -> &DiffOpContext {
        &self.0
    }

    pub fn prime(&self) -> PrimeChar {
        self.0.p
    }

    pub fn nx(&self) -> usize {
        self.0.nx
    }

    pub fn ny(&self) -> usize {
        self.0.ny
    }

    pub fn order_bound(&self) -> Option<&[u32]> {
        self.0.order_bound.as_deref()
    }

    pub fn is_truncated(&self) -> bool {
        self.0.order_bound.is_some()
    }

    /// `p^(k_i)` for `T_k`.
    pub fn dpow_limit(&self, i: usize) -> Option<u64> {
        self.order_bound().map(|k| self.prime().get().pow(k[i]))
    }

    fn width(&self) -> usize {
        2 * self.nx() + self.ny()
    }

    pub fn key(&self, alpha: &[u32], beta: &[u32], gamma: &[u32]) -> Monomial {
        Monomial::concat(&[alpha, beta, gamma])
    }

    pub fn split<'m>(&self, m: &'m Monomial) -> (&'m [u32], &'m [u32], &'m [u32]) {
        let (n, e) = (self.nx(), m.exps());
        (&e[..n], &e[n..2 * n], &e[2 * n..])
    }

    pub fn element(&self, terms: Terms) -> DiffOpElement {
        DiffOpElement { ring: self.clone(), terms }
    }

    pub fn zero(&self) -> DiffOpElement {
        self.element(Terms::new())
    }

    pub fn one(&self) -> DiffOpElement {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> DiffOpElement {
        let mut t = Terms::new();
        add_term(&mut t, self.prime(), Monomial::zero(self.width()), self.prime().reduce(c));
        self.element(t)
    }

    /// `c x^alpha d^[beta] y^gamma`, rejecting divided powers outside `T_k`.
    pub fn monomial(&self, alpha: &[u32], beta: &[u32], gamma: &[u32], c: u64) -> Result<DiffOpElement> {
        if alpha.len() != self.nx() || beta.len() != self.nx() || gamma.len() != self.ny() {
            return Err(Error::ContextMismatch("exponent vector lengths do not match the algebra".into()));
        }
        for (i, &b) in beta.iter().enumerate() {
            if let Some(lim) = self.dpow_limit(i) {
                if b as u64 >= lim {
                    return Err(Error::InvalidConfig(format!(
                        "divided power D{}[{}] is outside T_k (needs < {})",
                        i + 1,
                        b,
                        lim
                    )));
                }
            }
        }
        let mut t = Terms::new();
        add_term(&mut t, self.prime(), self.key(alpha, beta, gamma), self.prime().reduce(c));
        Ok(self.element(t))
    }

    pub fn x(&self, i: usize) -> DiffOpElement {
        let a = Monomial::unit(self.nx(), i, 1);
        self.monomial(a.exps(), &vec![0; self.nx()], &vec![0; self.ny()], 1).unwrap()
    }

    pub fn y(&self, j: usize) -> DiffOpElement {
        let g = Monomial::unit(self.ny(), j, 1);
        self.monomial(&vec![0; self.nx()], &vec![0; self.nx()], g.exps(), 1).unwrap()
    }

    /// `d_i^[k]`.
    pub fn d(&self, i: usize, k: u32) -> Result<DiffOpElement> {
        let b = Monomial::unit(self.nx(), i, k);
        self.monomial(&vec![0; self.nx()], b.exps(), &vec![0; self.ny()], 1)
    }

    /// `d^[beta] = prod_i d_i^[beta_i]`.
    pub fn d_multi(&self, beta: &[u32]) -> Result<DiffOpElement> {
        self.monomial(&vec![0; self.nx()], beta, &vec![0; self.ny()], 1)
    }

    fn check(&self, a: &DiffOpElement) {
        assert!(a.ring == *self, "differential operator from a different algebra");
    }

    /// Normal-ordered product, using
    /// `d^[k] x^m = sum_j C(m, j) x^(m-j) d^[k-j]` and `d^[k] d^[l] = C(k+l, k) d^[k+l]`.
    pub fn mul(&self, a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
        self.check(a);
        self.check(b);
        let (p, n) = (self.prime(), self.nx());
        let mut out = Terms::new();
        for (ka, &ca) in &a.terms {
            let (al, be, ga) = self.split(ka);
            for (kb, &cb) in &b.terms {
                let (al2, be2, ga2) = self.split(kb);
                // Per variable: (coefficient, new alpha, new beta) choices.
                let mut partial: Vec<(u64, Vec<u32>)> = vec![(p.mul(ca, cb), Vec::with_capacity(2 * n))];
                for i in 0..n {
                    let mut next = Vec::new();
                    for j in 0..=be[i].min(al2[i]) {
                        let c = p.mul(
                            p.binom(al2[i] as u64, j as u64),
                            p.binom((be[i] - j + be2[i]) as u64, be2[i] as u64),
                        );
                        if c == 0 {
                            continue;
                        }
                        for (pc, v) in &partial {
                            let mut w = v.clone();
                            w.push(al[i] + al2[i] - j);
                            w.push(be[i] - j + be2[i]);
                            next.push((p.mul(*pc, c), w));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (c, v) in partial {
                    let mut key = Vec::with_capacity(self.width());
                    key.extend(v.iter().step_by(2));
                    key.extend(v.iter().skip(1).step_by(2));
                    key.extend(ga.iter().zip(ga2).map(|(x, y)| x + y));
                    add_term(&mut out, p, Monomial::new(key), c);
                }
            }
        }
        if let Some(k) = self.order_bound() {
            debug_assert!(out.keys().all(|m| {
                let (_, be, _) = self.split(m);
                be.iter().zip(k).all(|(&b, &ki)| (b as u64) < p.get().pow(ki))
            }));
        }
        self.element(out)
    }

    pub fn pow(&self, a: &DiffOpElement, mut e: u64) -> DiffOpElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Centre membership: `P_m` for `D(P_n) (x) P_m`, and
    /// `K[x_i^(p^k_i), y]` for `T_k (x) P_m`.
    pub fn is_central(&self, a: &DiffOpElement) -> bool {
        let p = self.prime().get();
        a.terms.keys().all(|m| {
            let (al, be, _) = self.split(m);
            be.iter().all(|&b| b == 0)
                && match self.order_bound() {
                    None => al.iter().all(|&e| e == 0),
                    Some(k) => al.iter().zip(k).all(|(&e, &ki)| (e as u64).is_multiple_of(p.pow(ki))),
                }
        })
    }

    /// Number of polynomial generators of the centre.
    pub fn centre_nvars(&self) -> usize {
        if self.is_truncated() {
            self.nx() + self.ny()
        } else {
            self.ny()
        }
    }

    /// A central element written in the centre generators
    /// (`X_i = x_i^(p^k_i)` then `y_j` for `T_k`; `y_j` otherwise).
    pub fn central_to_poly(&self, a: &DiffOpElement) -> Result<MultiPoly> {
        if !self.is_central(a) {
            return Err(Error::InvariantViolation("element is not central".into()));
        }
        let p = self.prime();
        let terms = a.terms.iter().map(|(m, &c)| {
            let (al, _, ga) = self.split(m);
            let v: Vec<u32> = match self.order_bound() {
                None => ga.to_vec(),
                Some(k) => al
                    .iter()
                    .zip(k)
                    .map(|(&e, &ki)| e / p.get().pow(ki) as u32)
                    .chain(ga.iter().copied())
                    .collect(),
            };
            (Monomial::new(v), c)
        });
        Ok(MultiPoly::from_terms(p, self.centre_nvars(), terms))
    }

    /// Inverse of [`DiffOpRing::central_to_poly`].
    pub fn poly_to_central(&self, f: &MultiPoly) -> DiffOpElement {
        assert_eq!(f.nvars(), self.centre_nvars());
        let (p, n) = (self.prime(), self.nx());
        let mut out = Terms::new();
        for (m, &c) in f.terms() {
            let e = m.exps();
            let (al, ga): (Vec<u32>, &[u32]) = match self.order_bound() {
                None => (vec![0; n], e),
                Some(k) => (e[..n].iter().zip(k).map(|(&v, &ki)| v * p.get().pow(ki) as u32).collect(), &e[n..]),
            };
            add_term(&mut out, p, self.key(&al, &vec![0; n], ga), c);
        }
        self.element(out)
    }

    /// Rewrites into d-left order, keyed by `[beta, alpha, gamma]`, via
    /// `x^m d^[k] = sum_j (-1)^j C(m, j) d^[k-j] x^(m-j)`.
    pub fn to_d_left(&self, a: &DiffOpElement) -> Terms {
        self.check(a);
        let (p, n) = (self.prime(), self.nx());
        let mut out = Terms::new();
        for (m, &c) in &a.terms {
            let (al, be, ga) = self.split(m);
            let mut partial: Vec<(u64, Vec<u32>, Vec<u32>)> = vec![(c, vec![], vec![])];
            for i in 0..n {
                let mut next = Vec::new();
                for j in 0..=al[i].min(be[i]) {
                    let f = p.mul(p.sign(j as u64), p.binom(al[i] as u64, j as u64));
                    if f == 0 {
                        continue;
                    }
                    for (pc, b, x) in &partial {
                        let (mut b, mut x) = (b.clone(), x.clone());
                        b.push(be[i] - j);
                        x.push(al[i] - j);
                        next.push((p.mul(*pc, f), b, x));
                    }
                }
                partial = next;
            }
            for (c, b, x) in partial {
                add_term(&mut out, p, Monomial::concat(&[&b, &x, ga]), c);
            }
        }
        out
    }

    /// Builds an element from d-left terms keyed by `[beta, alpha, gamma]`.
    pub fn from_d_left(&self, terms: &Terms) -> DiffOpElement {
        let n = self.nx();
        let zero_n = vec![0; n];
        let zero_m = vec![0; self.ny()];
        let mut acc = self.zero();
        for (m, &c) in terms {
            let e = m.exps();
            let d = self.monomial(&zero_n, &e[..n], &zero_m, c).expect("d-left key within bounds");
            let xy = self.monomial(&e[n..2 * n], &zero_n, &e[2 * n..], 1).expect("no divided powers");
            acc = &acc + &self.mul(&d, &xy);
        }
        acc
    }

    /// Action on `P_n (x) P_m` (variables `x_1..x_n, y_1..y_m`), where `d^[beta]`
    /// acts by divided derivatives and `x`, `y` by multiplication.
    pub fn act_on(&self, a: &DiffOpElement, f: &MultiPoly) -> Result<MultiPoly> {
        let (p, n, m) = (self.prime(), self.nx(), self.ny());
        if f.prime() != p || f.nvars() != n + m {
            return Err(Error::ContextMismatch("polynomial does not match the operator algebra".into()));
        }
        let mut acc = MultiPoly::zero(p, n + m);
        for (key, &c) in &a.terms {
            let (al, be, ga) = self.split(key);
            let mut full = be.to_vec();
            full.extend(std::iter::repeat_n(0, m));
            let g = f.divided_derivative(&full);
            let mono = MultiPoly::monomial(p, Monomial::concat(&[al, ga]), c);
            acc = &acc + &(&mono * &g);
        }
        Ok(acc)
    }
}

/// `(+/- ad r)^k (a)`.
pub fn ad_power(r: &DiffOpElement, k: u64, a: &DiffOpElement, negate: bool) -> DiffOpElement {
    let ring = r.ring.clone();
    let mut cur = a.clone();
    for _ in 0..k {
        if cur.is_zero() {
            break;
        }
        cur = if negate { ring.commutator(&cur, r) } else { ring.commutator(r, &cur) };
    }
    cur
}

impl Algebra for DiffOpRing {
    type Elem = DiffOpElement;

    fn prime(&self) -> PrimeChar {
        self.0.p
    }
    fn zero(&self) -> DiffOpElement {
        DiffOpRing::zero(self)
    }
    fn one(&self) -> DiffOpElement {
        DiffOpRing::one(self)
    }
    fn add(&self, a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
        a + b
    }
    fn sub(&self, a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
        a - b
    }
    fn mul(&self, a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
        DiffOpRing::mul(self, a, b)
    }
    fn scale(&self, c: u64, a: &DiffOpElement) -> DiffOpElement {
        a.scale(c)
    }
    fn is_zero(&self, a: &DiffOpElement) -> bool {
        a.is_zero()
    }
}

/// A normal-ordered element `sum c x^alpha d^[beta] y^gamma`.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOpElement {
    ring: DiffOpRing,
    terms: Terms,
}

impl DiffOpElement {
    pub fn ring(&self) -> &DiffOpRing {
        &self.ring
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &[u32], beta: &[u32], gamma: &[u32]) -> u64 {
        self.terms.get(&self.ring.key(alpha, beta, gamma)).copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u64) -> DiffOpElement {
        let p = self.ring.prime();
        self.ring.element(scale_terms(&self.terms, p.reduce(c), p))
    }

    /// Componentwise maximum of the x-exponents.
    pub fn max_x_exponents(&self) -> Vec<u32> {
        let mut mx = vec![0; self.ring.nx()];
        for m in self.terms.keys() {
            for (a, &e) in mx.iter_mut().zip(self.ring.split(m).0) {
                *a = (*a).max(e);
            }
        }
        mx
    }

    pub fn checked_add(&self, other: &DiffOpElement) -> Result<DiffOpElement> {
        self.same(other)?;
        Ok(self.ring.element(add_terms(&self.terms, &other.terms, self.ring.prime())))
    }

    pub fn checked_sub(&self, other: &DiffOpElement) -> Result<DiffOpElement> {
        self.same(other)?;
        Ok(self.ring.element(sub_terms(&self.terms, &other.terms, self.ring.prime())))
    }

    pub fn checked_mul(&self, other: &DiffOpElement) -> Result<DiffOpElement> {
        self.same(other)?;
        Ok(self.ring.mul(self, other))
    }

    fn same(&self, other: &DiffOpElement) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::ContextMismatch("differential operators from different algebras".into()))
        }
    }

    /// Factor strings `x1^2`, `D1[3]`, `y1` for one key.
    pub fn factor_names(ring: &DiffOpRing, m: &Monomial) -> Vec<String> {
        let (al, be, ga) = ring.split(m);
        let mut f = Vec::new();
        for (i, &e) in al.iter().enumerate() {
            match e {
                0 => {}
                1 => f.push(format!("x{}", i + 1)),
                _ => f.push(format!("x{}^{}", i + 1, e)),
            }
        }
        for (i, &e) in be.iter().enumerate() {
            if e > 0 {
                f.push(format!("D{}[{}]", i + 1, e));
            }
        }
        for (j, &e) in ga.iter().enumerate() {
            match e {
                0 => {}
                1 => f.push(format!("y{}", j + 1)),
                _ => f.push(format!("y{}^{}", j + 1, e)),
            }
        }
        f
    }
}

impl Add for &DiffOpElement {
    type Output = DiffOpElement;
    fn add(self, rhs: &DiffOpElement) -> DiffOpElement {
        self.checked_add(rhs).expect("algebra mismatch")
    }
}

impl Sub for &DiffOpElement {
    type Output = DiffOpElement;
    fn sub(self, rhs: &DiffOpElement) -> DiffOpElement {
        self.checked_sub(rhs).expect("algebra mismatch")
    }
}

impl Mul for &DiffOpElement {
    type Output = DiffOpElement;
    fn mul(self, rhs: &DiffOpElement) -> DiffOpElement {
        self.checked_mul(rhs).expect("algebra mismatch")
    }
}

impl Neg for &DiffOpElement {
    type Output = DiffOpElement;
    fn neg(self) -> DiffOpElement {
        self.scale(self.ring.prime().neg(1))
    }
}

impl fmt::Display for DiffOpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = crate::cli::render::render_terms(
            self.terms.iter().map(|(m, &c)| (c, DiffOpElement::factor_names(&self.ring, m))),
        );
        f.write_str(&s)
    }
}

impl fmt::Debug for DiffOpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn bracket_relation() {
        let r = DiffOpRing::plain(pc(5), 1);
        let lhs = &r.d(0, 2).unwrap() * &r.x(0);
        let rhs = &(&r.x(0) * &r.d(0, 2).unwrap()) + &r.d(0, 1).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "D1[1] + x1*D1[2]");
    }

    #[test]
    fn carry_kills_product() {
        let r = DiffOpRing::plain(pc(3), 1);
        assert!((&r.d(0, 1).unwrap() * &r.d(0, 2).unwrap()).is_zero());
    }

    #[test]
    fn derivative_past_square() {
        let r = DiffOpRing::plain(pc(5), 1);
        let x2 = r.pow(&r.x(0), 2);
        let lhs = &r.d(0, 1).unwrap() * &x2;
        let rhs = &(&x2 * &r.d(0, 1).unwrap()) + &r.x(0).scale(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rewrite_matches_single_steps() {
        let p = pc(3);
        let r = DiffOpRing::plain(p, 1);
        // Oracle: d^[k] x^m = x (d^[k] x^(m-1)) + d^[k-1] x^(m-1), where left
        // multiplication by x only shifts exponents in x-left order.
        fn slow(r: &DiffOpRing, k: i64, m: u32) -> DiffOpElement {
            if k < 0 {
                return r.zero();
            }
            if m == 0 {
                return r.d(0, k as u32).unwrap();
            }
            let mut shifted = Terms::new();
            for (key, &c) in slow(r, k, m - 1).terms() {
                let (al, be, _) = r.split(key);
                shifted.insert(r.key(&[al[0] + 1], be, &[]), c);
            }
            &r.element(shifted) + &slow(r, k - 1, m - 1)
        }
        for k in 0..26u32 {
            for m in 0..10 {
                let fast = &r.d(0, k).unwrap() * &r.pow(&r.x(0), m as u64);
                assert_eq!(fast, slow(&r, k as i64, m), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn d_left_round_trip() {
        let r = DiffOpRing::new(pc(3), 2, 1, None).unwrap();
        let a = &(&r.x(0) * &r.d(0, 4).unwrap()) + &(&r.pow(&r.x(1), 3) * &(&r.d(1, 2).unwrap() * &r.y(0)));
        let dl = r.to_d_left(&a);
        assert_eq!(r.from_d_left(&dl), a);
    }

    #[test]
    fn truncated_closure_and_bounds() {
        let r = DiffOpRing::new(pc(2), 1, 0, Some(vec![2])).unwrap();
        assert!(r.d(0, 4).is_err());
        let d2 = r.d(0, 2).unwrap();
        assert!((&d2 * &d2).is_zero());
        let x4 = r.pow(&r.x(0), 4);
        assert!(r.is_central(&x4));
        assert!(!r.is_central(&r.pow(&r.x(0), 2)));
        let f = r.central_to_poly(&x4).unwrap();
        assert_eq!(f, MultiPoly::var(pc(2), 1, 0));
        assert_eq!(r.poly_to_central(&f), x4);
    }

    #[test]
    fn acts_as_divided_derivative() {
        let p = pc(5);
        let r = DiffOpRing::plain(p, 1);
        let f = MultiPoly::var(p, 1, 0).pow(3);
        let g = r.act_on(&r.d(0, 2).unwrap(), &f).unwrap();
        assert_eq!(g, MultiPoly::var(p, 1, 0).scale(3));
    }

    #[test]
    fn ad_of_x_lowers_divided_power() {
        let r = DiffOpRing::plain(pc(3), 1);
        for j in 1..10 {
            let got = ad_power(&r.x(0), 1, &r.d(0, j).unwrap(), true);
            assert_eq!(got, r.d(0, j - 1).unwrap());
        }
        let a = r.d(0, 4).unwrap();
        assert_eq!(ad_power(&r.x(0), 0, &a, false), a);
    }
}
