//! The Weyl algebra `A_n (x) P_m` in characteristic `p`.
//!
//! Elements are stored in q-left normal order `sum c q^alpha p^beta y^gamma`,
//! keyed by `[alpha, beta, gamma]`.

mod automorphism;
mod projection;

pub use automorphism::{invert_weyl_aut, WeylAutomorphism};
pub use projection::{proj_phi, proj_psi, reassemble_weyl_taylor, taylor_weyl, WeylFrame};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::descent::Algebra;
use crate::error::{Error, Result};
use crate::monomial::{add_term, add_terms, scale_terms, sub_terms, Monomial, Terms};
use crate::multipoly::MultiPoly;
use crate::primefield::PrimeChar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylContext {
    pub p: PrimeChar,
    pub n: usize,
    pub m: usize,
}

/// Shared handle on a [`WeylContext`]; acts as the [`Algebra`].
#[derive(Clone, Debug)]
pub struct WeylRing(Arc<WeylContext>);

impl PartialEq for WeylRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for WeylRing {}

impl WeylRing {
    pub fn new(p: PrimeChar, n: usize, m: usize) -> Self {
        WeylRing(Arc::new(WeylContext { p, n, m }))
    }

    pub fn prime(&self) -> PrimeChar {
        self.0.p
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    fn width(&self) -> usize {
        2 * self.n() + self.m()
    }

    pub fn key(&self, alpha: &[u32], beta: &[u32], gamma: &[u32]) -> Monomial {
        Monomial::concat(&[alpha, beta, gamma])
    }

    pub fn split<'m>(&self, m: &'m Monomial) -> (&'m [u32], &'m [u32], &'m [u32]) {
        let (n, e) = (self.n(), m.exps());
        (&e[..n], &e[n..2 * n], &e[2 * n..])
    }

    pub fn element(&self, terms: Terms) -> WeylElement {
        WeylElement { ring: self.clone(), terms }
    }

    pub fn zero(&self) -> WeylElement {
        self.element(Terms::new())
    }

    pub fn one(&self) -> WeylElement {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> WeylElement {
        let mut t = Terms::new();
        add_term(&mut t, self.prime(), Monomial::zero(self.width()), self.prime().reduce(c));
        self.element(t)
    }

    pub fn monomial(&self, alpha: &[u32], beta: &[u32], gamma: &[u32], c: u64) -> Result<WeylElement> {
        if alpha.len() != self.n() || beta.len() != self.n() || gamma.len() != self.m() {
            return Err(Error::ContextMismatch("exponent vector lengths do not match the algebra".into()));
        }
        let mut t = Terms::new();
        add_term(&mut t, self.prime(), self.key(alpha, beta, gamma), self.prime().reduce(c));
        Ok(self.element(t))
    }

    fn unit(&self, block: usize, i: usize) -> WeylElement {
        let mut t = Terms::new();
        t.insert(Monomial::unit(self.width(), block + i, 1), 1);
        self.element(t)
    }

    pub fn q(&self, i: usize) -> WeylElement {
        self.unit(0, i)
    }

    pub fn p(&self, i: usize) -> WeylElement {
        self.unit(self.n(), i)
    }

    pub fn y(&self, j: usize) -> WeylElement {
        self.unit(2 * self.n(), j)
    }

    fn check(&self, a: &WeylElement) {
        assert!(a.ring == *self, "Weyl element from a different algebra");
    }

    /// Normal-ordered product via `p^b q^a = sum_j C(a, j) C(b, j) j! q^(a-j) p^(b-j)`.
    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        self.check(a);
        self.check(b);
        let p = self.prime();
        self.element(reorder_product(p, self.n(), &a.terms, &b.terms))
    }

    pub fn pow(&self, a: &WeylElement, mut e: u64) -> WeylElement {
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

    /// Central iff every q- and p-exponent is divisible by the characteristic.
    pub fn is_central(&self, a: &WeylElement) -> bool {
        let p = self.prime().get() as u32;
        let n = self.n();
        a.terms.keys().all(|m| m.exps()[..2 * n].iter().all(|&e| e % p == 0))
    }

    /// `2n + m`: generators `X_i = q_i^p`, `X_(n+i) = p_i^p`, then `y_j`.
    pub fn centre_nvars(&self) -> usize {
        self.width()
    }

    pub fn central_to_poly(&self, a: &WeylElement) -> Result<MultiPoly> {
        if !self.is_central(a) {
            return Err(Error::InvariantViolation("element is not central".into()));
        }
        let p = self.prime();
        let n = self.n();
        let terms = a.terms.iter().map(|(m, &c)| {
            let e = m.exps();
            let v: Vec<u32> =
                e.iter().enumerate().map(|(i, &x)| if i < 2 * n { x / p.get() as u32 } else { x }).collect();
            (Monomial::new(v), c)
        });
        Ok(MultiPoly::from_terms(p, self.centre_nvars(), terms))
    }

    pub fn poly_to_central(&self, f: &MultiPoly) -> WeylElement {
        assert_eq!(f.nvars(), self.centre_nvars());
        let p = self.prime();
        let n = self.n();
        let mut out = Terms::new();
        for (m, &c) in f.terms() {
            let v: Vec<u32> =
                m.exps().iter().enumerate().map(|(i, &x)| if i < 2 * n { x * p.get() as u32 } else { x }).collect();
            add_term(&mut out, p, Monomial::new(v), c);
        }
        self.element(out)
    }

    /// Coordinates over the centre: `a = sum_(alpha, beta < p) z_(alpha beta) q^alpha p^beta`,
    /// with `z` written in the centre generators.
    pub fn centre_coordinates(&self, a: &WeylElement) -> BTreeMap<(Vec<u32>, Vec<u32>), MultiPoly> {
        let p = self.prime();
        let pp = p.get() as u32;
        let mut out: BTreeMap<(Vec<u32>, Vec<u32>), Terms> = BTreeMap::new();
        for (m, &c) in &a.terms {
            let (al, be, ga) = self.split(m);
            let slot = (al.iter().map(|e| e % pp).collect(), be.iter().map(|e| e % pp).collect());
            let mut x: Vec<u32> = al.iter().chain(be).map(|e| e / pp).collect();
            x.extend_from_slice(ga);
            add_term(out.entry(slot).or_default(), p, Monomial::new(x), c);
        }
        let nv = self.centre_nvars();
        out.into_iter().map(|(k, t)| (k, MultiPoly::from_terms(p, nv, t))).collect()
    }

    /// p-left form keyed by `[beta, alpha, gamma]`, via
    /// `q^a p^b = sum_j (-1)^j C(a, j) C(b, j) j! p^(b-j) q^(a-j)`.
    pub fn to_p_left(&self, a: &WeylElement) -> Terms {
        self.check(a);
        let (p, n) = (self.prime(), self.n());
        let mut out = Terms::new();
        for (m, &c) in &a.terms {
            let (al, be, ga) = self.split(m);
            let mut partial: Vec<(u64, Vec<u32>, Vec<u32>)> = vec![(c, vec![], vec![])];
            for i in 0..n {
                let mut next = Vec::new();
                for j in 0..=al[i].min(be[i]) {
                    let f = ordering_coeff(p, al[i], be[i], j, true);
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

    /// Builds an element from p-left terms keyed by `[beta, alpha, gamma]`.
    pub fn from_p_left(&self, terms: &Terms) -> WeylElement {
        let n = self.n();
        let mut acc = self.zero();
        for (m, &c) in terms {
            let e = m.exps();
            let zero_n = vec![0; n];
            let zero_m = vec![0; self.m()];
            let pp = self.monomial(&zero_n, &e[..n], &zero_m, c).expect("lengths");
            let qy = self.monomial(&e[n..2 * n], &zero_n, &e[2 * n..], 1).expect("lengths");
            acc = &acc + &self.mul(&pp, &qy);
        }
        acc
    }
}

/// `C(a, j) C(b, j) j!`, negated for odd `j` when `sign` is set.
fn ordering_coeff(p: PrimeChar, a: u32, b: u32, j: u32, sign: bool) -> u64 {
    let c = p.mul(p.mul(p.binom(a as u64, j as u64), p.binom(b as u64, j as u64)), p.factorial(j as u64));
    if sign {
        p.mul(c, p.sign(j as u64))
    } else {
        c
    }
}

fn reorder_product(p: PrimeChar, n: usize, a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ka, &ca) in a {
        let ea = ka.exps();
        for (kb, &cb) in b {
            let eb = kb.exps();
            let mut partial: Vec<(u64, Vec<u32>)> = vec![(p.mul(ca, cb), Vec::with_capacity(2 * n))];
            for i in 0..n {
                let (a1, b1, a2, b2) = (ea[i], ea[n + i], eb[i], eb[n + i]);
                let mut next = Vec::new();
                for j in 0..=b1.min(a2) {
                    let c = ordering_coeff(p, a2, b1, j, false);
                    if c == 0 {
                        continue;
                    }
                    for (pc, v) in &partial {
                        let mut w = v.clone();
                        w.push(a1 + a2 - j);
                        w.push(b1 + b2 - j);
                        next.push((p.mul(*pc, c), w));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (c, v) in partial {
                let mut key = Vec::with_capacity(ea.len());
                key.extend(v.iter().step_by(2));
                key.extend(v.iter().skip(1).step_by(2));
                key.extend(ea[2 * n..].iter().zip(&eb[2 * n..]).map(|(x, y)| x + y));
                add_term(&mut out, p, Monomial::new(key), c);
            }
        }
    }
    out
}

impl Algebra for WeylRing {
    type Elem = WeylElement;

    fn prime(&self) -> PrimeChar {
        self.0.p
    }
    fn zero(&self) -> WeylElement {
        WeylRing::zero(self)
    }
    fn one(&self) -> WeylElement {
        WeylRing::one(self)
    }
    fn add(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a + b
    }
    fn sub(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a - b
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        WeylRing::mul(self, a, b)
    }
    fn scale(&self, c: u64, a: &WeylElement) -> WeylElement {
        a.scale(c)
    }
    fn is_zero(&self, a: &WeylElement) -> bool {
        a.is_zero()
    }
}

/// A q-left normal-ordered element `sum c q^alpha p^beta y^gamma`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    ring: WeylRing,
    terms: Terms,
}

impl WeylElement {
    pub fn ring(&self) -> &WeylRing {
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

    pub fn scale(&self, c: u64) -> WeylElement {
        let p = self.ring.prime();
        self.ring.element(scale_terms(&self.terms, p.reduce(c), p))
    }

    fn same(&self, other: &WeylElement) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::ContextMismatch("Weyl elements from different algebras".into()))
        }
    }

    pub fn checked_add(&self, other: &WeylElement) -> Result<WeylElement> {
        self.same(other)?;
        Ok(self.ring.element(add_terms(&self.terms, &other.terms, self.ring.prime())))
    }

    pub fn checked_sub(&self, other: &WeylElement) -> Result<WeylElement> {
        self.same(other)?;
        Ok(self.ring.element(sub_terms(&self.terms, &other.terms, self.ring.prime())))
    }

    pub fn checked_mul(&self, other: &WeylElement) -> Result<WeylElement> {
        self.same(other)?;
        Ok(self.ring.mul(self, other))
    }

    pub fn factor_names(ring: &WeylRing, m: &Monomial) -> Vec<String> {
        let (al, be, ga) = ring.split(m);
        let mut f = Vec::new();
        for (name, block) in [("q", al), ("p", be), ("y", ga)] {
            for (i, &e) in block.iter().enumerate() {
                match e {
                    0 => {}
                    1 => f.push(format!("{}{}", name, i + 1)),
                    _ => f.push(format!("{}{}^{}", name, i + 1, e)),
                }
            }
        }
        f
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        self.checked_add(rhs).expect("algebra mismatch")
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        self.checked_sub(rhs).expect("algebra mismatch")
    }
}

impl Mul for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: &WeylElement) -> WeylElement {
        self.checked_mul(rhs).expect("algebra mismatch")
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        self.scale(self.ring.prime().neg(1))
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = crate::cli::render::render_terms(
            self.terms.iter().map(|(m, &c)| (c, WeylElement::factor_names(&self.ring, m))),
        );
        f.write_str(&s)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weyl({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: usize, m: usize) -> WeylRing {
        WeylRing::new(PrimeChar::new(p).unwrap(), n, m)
    }

    #[test]
    fn canonical_commutation() {
        let r = ring(5, 1, 0);
        let pq = &r.p(0) * &r.q(0);
        assert_eq!(pq, &(&r.q(0) * &r.p(0)) + &r.one());
        assert_eq!(pq.to_string(), "1 + q1*p1");
    }

    #[test]
    fn square_in_char_two() {
        let r = ring(2, 1, 0);
        let s = &r.p(0) + &r.q(0);
        let want = &(&r.pow(&r.p(0), 2) + &r.pow(&r.q(0), 2)) + &r.one();
        assert_eq!(r.pow(&s, 2), want);
    }

    #[test]
    fn reorder_matches_single_steps() {
        let r = ring(3, 1, 0);
        let shift = |a: &WeylElement, dq: u32, dp: u32| {
            let t = a.terms().iter().map(|(k, &c)| (Monomial::new(vec![k.exps()[0] + dq, k.exps()[1] + dp]), c));
            r.element(t.collect())
        };
        // p q^a = q (p q^(a-1)) + q^(a-1), from the single relation p q = q p + 1.
        let mut p_times_q = vec![r.p(0)];
        for a in 1..9 {
            let prev = shift(&p_times_q[a - 1], 1, 0);
            p_times_q.push(&prev + &r.pow(&r.q(0), a as u64 - 1));
        }
        let p_times = |x: &WeylElement| {
            let mut acc = r.zero();
            for (k, &c) in x.terms() {
                acc = &acc + &shift(&p_times_q[k.exps()[0] as usize], 0, k.exps()[1]).scale(c);
            }
            acc
        };
        for a in 0..8u64 {
            let mut slow = r.pow(&r.q(0), a);
            for b in 0..8u64 {
                assert_eq!(slow, &r.pow(&r.p(0), b) * &r.pow(&r.q(0), a), "a={a} b={b}");
                slow = p_times(&slow);
            }
        }
    }

    #[test]
    fn p_th_powers_central() {
        let r = ring(3, 2, 1);
        let a = &(&r.pow(&r.q(0), 2) * &r.p(1)) + &(&r.y(0) * &r.p(0));
        for z in [r.pow(&r.q(0), 3), r.pow(&r.p(1), 3), r.y(0)] {
            assert!(r.is_central(&z));
            assert!(r.commutator(&z, &a).is_zero());
        }
    }

    #[test]
    fn centre_coordinates_split_exponents() {
        let r = ring(3, 1, 0);
        let a = r.pow(&r.q(0), 4);
        let c = r.centre_coordinates(&a);
        assert_eq!(c.len(), 1);
        let (slot, z) = c.into_iter().next().unwrap();
        assert_eq!(slot, (vec![1], vec![0]));
        assert_eq!(z, MultiPoly::var(r.prime(), 2, 0));
    }

    #[test]
    fn p_left_round_trip() {
        let r = ring(5, 2, 1);
        let a = &(&r.pow(&r.q(0), 3) * &r.pow(&r.p(0), 2)) + &(&r.q(1) * &(&r.p(1) * &r.y(0)));
        assert_eq!(r.from_p_left(&r.to_p_left(&a)), a);
    }
}
