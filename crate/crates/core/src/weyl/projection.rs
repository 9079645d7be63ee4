//! The projections `Phi`, `Psi` onto the centre and the Taylor coefficients.

use std::collections::BTreeMap;

use crate::descent::{
    descent_decompose, descent_decompose_psi, phi_projection, psi_projection, Descent, InnerDerivation,
};
use crate::error::{Error, Result};
use crate::monomial::{add_term, Monomial, Terms};
use crate::multipoly::MultiPoly;

use super::{WeylAutomorphism, WeylElement, WeylRing};

/// Standard generators `q, p`, or their images under an automorphism.
#[derive(Clone, Copy)]
pub struct WeylFrame<'a> {
    ring: &'a WeylRing,
    aut: Option<&'a WeylAutomorphism>,
}

/// Central coordinates indexed by `(alpha, beta)`, `alpha, beta < p`.
pub type WeylCoordinates = BTreeMap<(Vec<u32>, Vec<u32>), WeylElement>;

impl<'a> WeylFrame<'a> {
    pub fn standard(ring: &'a WeylRing) -> Self {
        WeylFrame { ring, aut: None }
    }

    pub fn twisted(aut: &'a WeylAutomorphism) -> Self {
        WeylFrame { ring: aut.ring(), aut: Some(aut) }
    }

    pub fn q(&self, i: usize) -> WeylElement {
        self.aut.map_or_else(|| self.ring.q(i), |a| a.q_images()[i].clone())
    }

    pub fn p(&self, i: usize) -> WeylElement {
        self.aut.map_or_else(|| self.ring.p(i), |a| a.p_images()[i].clone())
    }

    fn divided_powers(&self, g: &WeylElement) -> Result<Vec<WeylElement>> {
        let r = self.ring;
        let p = r.prime();
        let mut out = Vec::with_capacity(p.get() as usize);
        let mut cur = r.one();
        for j in 0..p.get() {
            out.push(cur.scale(p.factorial_inv(j)?));
            cur = r.mul(&cur, g);
        }
        Ok(out)
    }

    /// `(-ad q'_i, p'_i^j / j!)`.
    fn p_descents(&self) -> Result<Vec<Descent<'static, WeylRing>>> {
        (0..self.ring.n())
            .map(|i| {
                Ok(Descent::finite(
                    InnerDerivation::neg_ad(self.q(i), format!("q{}'", i + 1)),
                    self.divided_powers(&self.p(i))?,
                ))
            })
            .collect()
    }

    /// `(ad p'_i, q'_i^j / j!)`.
    fn q_descents(&self) -> Result<Vec<Descent<'static, WeylRing>>> {
        (0..self.ring.n())
            .map(|i| {
                Ok(Descent::finite(
                    InnerDerivation::ad(self.p(i), format!("p{}'", i + 1)),
                    self.divided_powers(&self.q(i))?,
                ))
            })
            .collect()
    }

    /// `Phi` (p'-left) or `Psi` (q'-left) onto the centre.
    pub fn project(&self, a: &WeylElement, phi: bool) -> Result<WeylElement> {
        let pd = self.p_descents()?;
        let b = if phi { phi_projection(self.ring, &pd, a)? } else { psi_projection(self.ring, &pd, a)? };
        let z = phi_projection(self.ring, &self.q_descents()?, &b)?;
        if !self.ring.is_central(&z) {
            return Err(Error::InvariantViolation("projection did not land in the centre".into()));
        }
        Ok(z)
    }

    /// `a = sum z q'^alpha p'^beta` (`phi = false`) or `a = sum p'^beta q'^alpha z` (`phi = true`).
    pub fn coordinates(&self, a: &WeylElement, phi: bool) -> Result<WeylCoordinates> {
        let r = self.ring;
        let p = r.prime();
        let pd = self.p_descents()?;
        let qd = self.q_descents()?;
        let outer = if phi { descent_decompose(r, &pd, a)? } else { descent_decompose_psi(r, &pd, a)? };
        let mut out = BTreeMap::new();
        for (beta, c) in outer.components {
            for (alpha, z) in descent_decompose(r, &qd, &c)?.components {
                if !r.is_central(&z) {
                    return Err(Error::InvariantViolation("coordinate is not central".into()));
                }
                let f = alpha.iter().chain(&beta).try_fold(1, |f, &j| Ok::<_, Error>(p.mul(f, p.factorial_inv(j as u64)?)))?;
                let key = (alpha.iter().map(|&v| v as u32).collect(), beta.iter().map(|&v| v as u32).collect());
                out.insert(key, z.scale(f));
            }
        }
        Ok(out)
    }
}

fn frame<'a>(a: &'a WeylElement, aut: Option<&'a WeylAutomorphism>) -> Result<WeylFrame<'a>> {
    match aut {
        Some(s) if s.ring() != a.ring() => {
            Err(Error::ContextMismatch("element and automorphism algebras differ".into()))
        }
        Some(s) => Ok(WeylFrame::twisted(s)),
        None => Ok(WeylFrame::standard(a.ring())),
    }
}

/// The `(0, 0)` central coordinate in the p-left basis (of the twisted generators when given).
pub fn proj_phi(a: &WeylElement, aut: Option<&WeylAutomorphism>) -> Result<MultiPoly> {
    a.ring().central_to_poly(&frame(a, aut)?.project(a, true)?)
}

/// The `(0, 0)` central coordinate in the q-left basis.
pub fn proj_psi(a: &WeylElement, aut: Option<&WeylAutomorphism>) -> Result<MultiPoly> {
    a.ring().central_to_poly(&frame(a, aut)?.project(a, false)?)
}

/// Coefficients keyed by `(alpha, beta, gamma)` with `gamma` over the centre generators.
pub type WeylTaylor = BTreeMap<(Vec<u32>, Vec<u32>, Vec<u32>), u64>;

fn flatten(ring: &WeylRing, coords: WeylCoordinates) -> Result<WeylTaylor> {
    let mut out = BTreeMap::new();
    for ((al, be), z) in coords {
        for (m, &c) in ring.central_to_poly(&z)?.terms() {
            out.insert((al.clone(), be.clone(), m.exps().to_vec()), c);
        }
    }
    Ok(out)
}

fn stored_key(ring: &WeylRing, al: &[u32], be: &[u32], ga: &[u32], p_left: bool) -> Monomial {
    let n = ring.n();
    let pp = ring.prime().get() as u32;
    let q: Vec<u32> = (0..n).map(|i| al[i] + pp * ga[i]).collect();
    let pe: Vec<u32> = (0..n).map(|i| be[i] + pp * ga[n + i]).collect();
    if p_left {
        Monomial::concat(&[&pe, &q, &ga[2 * n..]])
    } else {
        Monomial::concat(&[&q, &pe, &ga[2 * n..]])
    }
}

/// Scalar Taylor coefficients over `q^alpha p^beta X^gamma` (q-left), cross-checked
/// against the p-left coefficients of `p^beta q^alpha X^gamma`.
pub fn taylor_weyl(a: &WeylElement) -> Result<WeylTaylor> {
    let r = a.ring();
    let f = WeylFrame::standard(r);
    let right = flatten(r, f.coordinates(a, false)?)?;
    let left = flatten(r, f.coordinates(a, true)?)?;
    let rebuilt: Terms = right.iter().map(|((al, be, ga), &c)| (stored_key(r, al, be, ga, false), c)).collect();
    if rebuilt != *a.terms() {
        return Err(Error::InvariantViolation("q-left Taylor coefficients disagree with the normal form".into()));
    }
    let rebuilt: Terms = left.iter().map(|((al, be, ga), &c)| (stored_key(r, al, be, ga, true), c)).collect();
    if rebuilt != r.to_p_left(a) {
        return Err(Error::InvariantViolation("p-left Taylor coefficients disagree with the p-left form".into()));
    }
    Ok(right)
}

/// `sum lambda q^alpha p^beta X^gamma`.
pub fn reassemble_weyl_taylor(ring: &WeylRing, coeffs: &WeylTaylor) -> WeylElement {
    let p = ring.prime();
    let mut terms = Terms::new();
    for ((al, be, ga), &c) in coeffs {
        add_term(&mut terms, p, stored_key(ring, al, be, ga, false), c);
    }
    ring.element(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primefield::PrimeChar;

    fn ring(p: u64, n: usize, m: usize) -> WeylRing {
        WeylRing::new(PrimeChar::new(p).unwrap(), n, m)
    }

    #[test]
    fn projection_examples() {
        let r = ring(2, 1, 0);
        let a = &r.pow(&r.q(0), 2) + &r.q(0);
        let x1 = MultiPoly::var(r.prime(), 2, 0);
        assert_eq!(proj_phi(&a, None).unwrap(), x1);
        assert_eq!(proj_psi(&a, None).unwrap(), x1);
        assert!(proj_phi(&r.q(0), None).unwrap().is_zero());
    }

    #[test]
    fn taylor_examples() {
        let r = ring(5, 1, 0);
        let t = taylor_weyl(&(&r.q(0) * &r.p(0))).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[&(vec![1], vec![1], vec![0, 0])], 1);
        let t = taylor_weyl(&(&r.p(0) * &r.q(0))).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[&(vec![0], vec![0], vec![0, 0])], 1);
    }

    #[test]
    fn taylor_round_trip() {
        let r = ring(3, 2, 1);
        let a = &(&r.pow(&r.q(0), 5) * &r.pow(&r.p(1), 4)) + &(&r.pow(&r.p(0), 7) * &(&r.q(1) * &r.y(0)));
        let a = &a + &r.scalar(2);
        assert_eq!(reassemble_weyl_taylor(&r, &taylor_weyl(&a).unwrap()), a);
    }
}
