//! The projections `phi`, `psi` onto the centre, the x-side level ladder and
//! the noncommutative Taylor coefficients.

use std::collections::BTreeMap;

use crate::descent::{
    descent_decompose, descent_decompose_psi, phi_projection, phi_single, psi_projection, Algebra, Descent,
    InnerDerivation,
};
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::multipoly::MultiPoly;

use super::{DiffOpAutomorphism, DiffOpElement, DiffOpRing};

/// Hard cap on ladder levels for frames without a level budget.
const MAX_LADDER_LEVELS: usize = 64;

/// Which normal order a projection reads off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `phi`: coefficients of `d'^[beta] x'^alpha` (divided powers on the left).
    Left,
    /// `psi`: coefficients of `x'^alpha d'^[beta]` (divided powers on the right).
    Right,
}

/// A system of canonical generators: the standard one, or the image of the
/// standard one under an automorphism.
#[derive(Clone, Copy)]
pub struct DiffOpFrame<'a> {
    ring: &'a DiffOpRing,
    aut: Option<&'a DiffOpAutomorphism>,
}

/// Central coordinates indexed by `(alpha, beta)`.
pub type FrameCoordinates = BTreeMap<(Vec<u32>, Vec<u32>), DiffOpElement>;

impl<'a> DiffOpFrame<'a> {
    pub fn standard(ring: &'a DiffOpRing) -> Self {
        DiffOpFrame { ring, aut: None }
    }

    pub fn twisted(aut: &'a DiffOpAutomorphism) -> Self {
        DiffOpFrame { ring: aut.ring(), aut: Some(aut) }
    }

    pub fn ring(&self) -> &DiffOpRing {
        self.ring
    }

    pub fn x(&self, i: usize) -> DiffOpElement {
        match self.aut {
            Some(a) => a.x_images()[i].clone(),
            None => self.ring.x(i),
        }
    }

    /// `d'_i^[k]`; zero past the truncation in `T_k`.
    pub fn dpow(&self, i: usize, k: u64) -> Result<DiffOpElement> {
        if self.ring.dpow_limit(i).is_some_and(|lim| k >= lim) {
            return Ok(self.ring.zero());
        }
        match self.aut {
            Some(a) => a.composite(i, k),
            None => self.ring.d(i, k as u32),
        }
    }

    /// Number of ladder levels available for variable `i` (`None`: unbounded).
    pub fn levels(&self, i: usize) -> Option<usize> {
        match (self.ring.order_bound(), self.aut) {
            (Some(k), _) => Some(k[i] as usize),
            (None, Some(a)) => Some(a.levels(i)),
            (None, None) => None,
        }
    }

    /// Descents `(-ad x'_i, d'_i^[j])` for the divided-power side.
    fn dpow_descents(&self) -> Vec<Descent<'a, DiffOpRing>> {
        let frame = *self;
        (0..self.ring.nx())
            .map(|i| {
                let len = self.ring.dpow_limit(i).map(|l| l as usize);
                Descent::new(
                    InnerDerivation::neg_ad(frame.x(i), format!("x{}'", i + 1)),
                    len,
                    move |j| frame.dpow(i, j as u64),
                )
            })
            .collect()
    }

    /// Level-`k` descent `(ad d'_i^[p^k], x'_i^(p^k j) / j!)`, `j < p`.
    fn ladder_descent(&self, i: usize, k: usize) -> Result<Descent<'a, DiffOpRing>> {
        let r = self.ring;
        let p = r.prime();
        let q = p.get().pow(k as u32);
        let d = self.dpow(i, q)?;
        let xq = r.pow(&self.x(i), q);
        let mut terms = Vec::with_capacity(p.get() as usize);
        let mut cur = r.one();
        for j in 0..p.get() {
            terms.push(cur.scale(p.factorial_inv(j)?));
            cur = r.mul(&cur, &xq);
        }
        Ok(Descent::finite(InnerDerivation::ad(d, format!("D{}[{}]'", i + 1, q)), terms))
    }

    fn check_level(&self, i: usize, k: usize) -> Result<bool> {
        match self.levels(i) {
            Some(l) => Ok(k < l),
            None if k < MAX_LADDER_LEVELS => Ok(true),
            None => Err(Error::ResourceBound(format!("ladder exceeded {MAX_LADDER_LEVELS} levels"))),
        }
    }

    fn ladder_failure(&self, k: usize) -> Error {
        if self.ring.is_truncated() {
            Error::InvariantViolation("residual not central after the full T_k ladder".into())
        } else {
            Error::InsufficientLevels { level: k as u32 }
        }
    }

    /// Projects an element of `Z[x']` onto `Z` by the x-side ladder, level by
    /// level for every variable, until the residual is central.
    pub fn ladder_project(&self, a: &DiffOpElement) -> Result<DiffOpElement> {
        let r = self.ring;
        let mut cur = a.clone();
        let mut k = 0;
        while !r.is_central(&cur) {
            let mut any = false;
            for i in 0..r.nx() {
                if self.check_level(i, k)? {
                    any = true;
                    cur = phi_single(r, &self.ladder_descent(i, k)?, &cur)?;
                }
            }
            if !any {
                return Err(self.ladder_failure(k));
            }
            k += 1;
        }
        Ok(cur)
    }

    /// Writes an element of `Z[x']` as `sum_alpha z_alpha x'^alpha`, `z_alpha` central.
    pub fn ladder_decompose(&self, a: &DiffOpElement) -> Result<BTreeMap<Vec<u32>, DiffOpElement>> {
        let r = self.ring;
        let (p, n) = (r.prime(), r.nx());
        let mut work = vec![(vec![0u32; n], a.clone())];
        let mut done = BTreeMap::new();
        let mut k = 0;
        loop {
            work.retain(|(alpha, z)| {
                if r.is_central(z) {
                    done.insert(alpha.clone(), z.clone());
                    false
                } else {
                    true
                }
            });
            if work.is_empty() {
                break;
            }
            let mut any = false;
            for i in 0..n {
                if !self.check_level(i, k)? {
                    continue;
                }
                any = true;
                let desc = self.ladder_descent(i, k)?;
                let q = p.get().pow(k as u32) as u32;
                let mut next = Vec::new();
                for (alpha, z) in work {
                    for (js, c) in descent_decompose(r, std::slice::from_ref(&desc), &z)?.components {
                        let j = js[0];
                        let mut al = alpha.clone();
                        al[i] += q * j as u32;
                        next.push((al, c.scale(p.factorial_inv(j as u64)?)));
                    }
                }
                work = next;
            }
            if !any {
                return Err(self.ladder_failure(k));
            }
            k += 1;
        }
        done.retain(|_, z| !z.is_zero());
        Ok(done)
    }

    /// Projection onto the centre: divided-power side first, then the ladder.
    pub fn project(&self, a: &DiffOpElement, side: Side) -> Result<DiffOpElement> {
        let ds = self.dpow_descents();
        let b = match side {
            Side::Left => phi_projection(self.ring, &ds, a)?,
            Side::Right => psi_projection(self.ring, &ds, a)?,
        };
        self.ladder_project(&b)
    }

    /// Central coordinates of `a` in this frame: `a = sum z x'^alpha d'^[beta]`
    /// for [`Side::Right`] and `a = sum d'^[beta] x'^alpha z` for [`Side::Left`].
    pub fn coordinates(&self, a: &DiffOpElement, side: Side) -> Result<FrameCoordinates> {
        let ds = self.dpow_descents();
        let dec = match side {
            Side::Left => descent_decompose(self.ring, &ds, a)?,
            Side::Right => descent_decompose_psi(self.ring, &ds, a)?,
        };
        let mut out = BTreeMap::new();
        for (beta, c) in dec.components {
            let beta: Vec<u32> = beta.into_iter().map(|b| b as u32).collect();
            for (alpha, z) in self.ladder_decompose(&c)? {
                out.insert((alpha, beta.clone()), z);
            }
        }
        Ok(out)
    }
}

/// `phi` (left) or `psi` (right) onto the centre, in the frame of `aut` when
/// given, as a polynomial in the centre generators.
pub fn proj_to_scalars(a: &DiffOpElement, side: Side, aut: Option<&DiffOpAutomorphism>) -> Result<MultiPoly> {
    let frame = match aut {
        Some(s) => {
            if s.ring() != a.ring() {
                return Err(Error::ContextMismatch("element and automorphism algebras differ".into()));
            }
            DiffOpFrame::twisted(s)
        }
        None => DiffOpFrame::standard(a.ring()),
    };
    a.ring().central_to_poly(&frame.project(a, side)?)
}

/// Taylor coefficients keyed by `(alpha, beta, gamma)`, where `gamma` is an
/// exponent vector over the centre generators.
pub type TaylorCoefficients = BTreeMap<(Vec<u32>, Vec<u32>, Vec<u32>), u64>;

fn flatten(ring: &DiffOpRing, coords: FrameCoordinates) -> Result<TaylorCoefficients> {
    let mut out = BTreeMap::new();
    for ((alpha, beta), z) in coords {
        for (m, &c) in ring.central_to_poly(&z)?.terms() {
            out.insert((alpha.clone(), beta.clone(), m.exps().to_vec()), c);
        }
    }
    Ok(out)
}

/// Stored key of the basis element `x^alpha d^[beta] X^gamma` (`X` the centre generators),
/// with `alpha` and `beta` in the given order.
fn basis_key(ring: &DiffOpRing, alpha: &[u32], beta: &[u32], gamma: &[u32], d_left: bool) -> Monomial {
    let n = ring.nx();
    let (gx, gy): (Vec<u32>, &[u32]) = match ring.order_bound() {
        Some(k) => (
            (0..n).map(|i| alpha[i] + gamma[i] * ring.prime().get().pow(k[i]) as u32).collect(),
            &gamma[n..],
        ),
        None => (alpha.to_vec(), gamma),
    };
    if d_left {
        Monomial::concat(&[beta, &gx, gy])
    } else {
        ring.key(&gx, beta, gy)
    }
}

/// The noncommutative Taylor coefficients of `a` over the basis
/// `x^alpha d^[beta]` with central coefficients, computed with `psi` and
/// cross-checked against the `phi` coefficients of `d^[beta] x^alpha`.
pub fn taylor_diffop(a: &DiffOpElement) -> Result<TaylorCoefficients> {
    let ring = a.ring();
    let frame = DiffOpFrame::standard(ring);
    let right = flatten(ring, frame.coordinates(a, Side::Right)?)?;
    let left = flatten(ring, frame.coordinates(a, Side::Left)?)?;
    let rebuilt: BTreeMap<Monomial, u64> =
        right.iter().map(|((al, be, ga), &c)| (basis_key(ring, al, be, ga, false), c)).collect();
    if rebuilt != *a.terms() {
        return Err(Error::InvariantViolation("psi-form Taylor coefficients disagree with the x-left normal form".into()));
    }
    let rebuilt: BTreeMap<Monomial, u64> =
        left.iter().map(|((al, be, ga), &c)| (basis_key(ring, al, be, ga, true), c)).collect();
    if rebuilt != ring.to_d_left(a) {
        return Err(Error::InvariantViolation("phi-form Taylor coefficients disagree with the d-left normal form".into()));
    }
    Ok(right)
}

/// `sum lambda x^alpha d^[beta] X^gamma`.
pub fn reassemble_taylor(ring: &DiffOpRing, coeffs: &TaylorCoefficients) -> DiffOpElement {
    let p = ring.prime();
    let mut terms = BTreeMap::new();
    for ((al, be, ga), &c) in coeffs {
        crate::monomial::add_term(&mut terms, p, basis_key(ring, al, be, ga, false), c);
    }
    ring.element(terms)
}

impl DiffOpRing {
    /// `x^alpha d^[beta]` times a central element.
    pub(crate) fn basis_times(&self, alpha: &[u32], beta: &[u32], z: &DiffOpElement) -> Result<DiffOpElement> {
        let zero_m = vec![0; self.ny()];
        Ok(Algebra::mul(self, &self.monomial(alpha, beta, &zero_m, 1)?, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primefield::PrimeChar;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn scalar_projection_examples() {
        let r = DiffOpRing::plain(pc(5), 1);
        let a = &r.scalar(3) + &(&r.x(0) * &r.d(0, 2).unwrap());
        for side in [Side::Left, Side::Right] {
            assert_eq!(proj_to_scalars(&a, side, None).unwrap().constant_term(), 3);
            let b = &r.d(0, 3).unwrap() * &r.pow(&r.x(0), 2);
            assert!(proj_to_scalars(&b, side, None).unwrap().is_zero());
        }
    }

    #[test]
    fn taylor_of_small_elements() {
        let r = DiffOpRing::plain(pc(3), 1);
        let a = &r.d(0, 1).unwrap() * &r.x(0);
        let t = taylor_diffop(&a).unwrap();
        let want: TaylorCoefficients =
            [((vec![1], vec![1], vec![]), 1), ((vec![0], vec![0], vec![]), 1)].into_iter().collect();
        assert_eq!(t, want);
    }

    #[test]
    fn taylor_round_trip_variants() {
        let p = pc(3);
        let plain = DiffOpRing::plain(p, 2);
        let a = &(&plain.pow(&plain.x(0), 4) * &plain.d(1, 5).unwrap()) + &plain.d_multi(&[2, 3]).unwrap();
        let a = &a + &(&plain.d(0, 1).unwrap() * &plain.x(1));
        assert_eq!(reassemble_taylor(&plain, &taylor_diffop(&a).unwrap()), a);

        let ext = DiffOpRing::new(p, 1, 1, None).unwrap();
        let b = &(&ext.y(0) * &ext.d(0, 4).unwrap()) + &ext.pow(&ext.x(0), 7);
        assert_eq!(reassemble_taylor(&ext, &taylor_diffop(&b).unwrap()), b);

        let tk = DiffOpRing::new(p, 2, 1, Some(vec![1, 2])).unwrap();
        let c = &(&tk.pow(&tk.x(0), 7) * &tk.d(1, 8).unwrap()) + &(&tk.y(0) * &tk.x(1));
        let t = taylor_diffop(&c).unwrap();
        assert!(t.keys().all(|(al, be, _)| al[0] < 3 && be[0] < 3 && al[1] < 9 && be[1] < 9));
        assert_eq!(reassemble_taylor(&tk, &t), c);
    }
}
