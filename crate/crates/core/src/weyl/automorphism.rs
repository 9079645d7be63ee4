use std::fmt;

use crate::descent::Algebra;
use crate::error::{Error, Result};
use crate::multipoly::{CoordinateEngine, PolyAutomorphism};

use super::projection::WeylFrame;
use super::{WeylElement, WeylRing};

/// Images of `q_i`, `p_i` and the central `y_j`, validated against the
/// canonical commutation relations.
#[derive(Clone, PartialEq)]
pub struct WeylAutomorphism {
    ring: WeylRing,
    q_images: Vec<WeylElement>,
    p_images: Vec<WeylElement>,
    y_images: Vec<WeylElement>,
}

impl fmt::Debug for WeylAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylAutomorphism")
            .field("q_images", &self.q_images)
            .field("p_images", &self.p_images)
            .field("y_images", &self.y_images)
            .finish()
    }
}

impl WeylAutomorphism {
    pub fn new(
        ring: WeylRing,
        q_images: Vec<WeylElement>,
        p_images: Vec<WeylElement>,
        y_images: Vec<WeylElement>,
    ) -> Result<Self> {
        if q_images.len() != ring.n() || p_images.len() != ring.n() || y_images.len() != ring.m() {
            return Err(Error::ContextMismatch("wrong number of generator images".into()));
        }
        if q_images.iter().chain(&p_images).chain(&y_images).any(|e| *e.ring() != ring) {
            return Err(Error::ContextMismatch("image from a different algebra".into()));
        }
        let aut = WeylAutomorphism { ring, q_images, p_images, y_images };
        aut.validate()?;
        Ok(aut)
    }

    pub fn identity(ring: &WeylRing) -> Self {
        WeylAutomorphism {
            ring: ring.clone(),
            q_images: (0..ring.n()).map(|i| ring.q(i)).collect(),
            p_images: (0..ring.n()).map(|i| ring.p(i)).collect(),
            y_images: (0..ring.m()).map(|j| ring.y(j)).collect(),
        }
    }

    pub fn ring(&self) -> &WeylRing {
        &self.ring
    }

    pub fn q_images(&self) -> &[WeylElement] {
        &self.q_images
    }

    pub fn p_images(&self) -> &[WeylElement] {
        &self.p_images
    }

    pub fn y_images(&self) -> &[WeylElement] {
        &self.y_images
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ring)
    }

    fn validate(&self) -> Result<()> {
        let r = &self.ring;
        let n = r.n();
        let fail = |s: String| Err(Error::RelationViolation(s));
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { r.one() } else { r.zero() };
                if r.commutator(&self.p_images[i], &self.q_images[j]) != want {
                    return fail(format!("[p{}', q{}'] != {}", i + 1, j + 1, u8::from(i == j)));
                }
                if j > i {
                    if !r.commutator(&self.q_images[i], &self.q_images[j]).is_zero() {
                        return fail(format!("[q{}', q{}'] != 0", i + 1, j + 1));
                    }
                    if !r.commutator(&self.p_images[i], &self.p_images[j]).is_zero() {
                        return fail(format!("[p{}', p{}'] != 0", i + 1, j + 1));
                    }
                }
            }
        }
        for (j, y) in self.y_images.iter().enumerate() {
            if !r.is_central(y) {
                return fail(format!("y{}' is not central", j + 1));
            }
        }
        let p = r.prime().get();
        for (name, imgs) in [("q", &self.q_images), ("p", &self.p_images)] {
            for (i, g) in imgs.iter().enumerate() {
                if !r.is_central(&r.pow(g, p)) {
                    return fail(format!("{}{}'^{} is not central", name, i + 1, p));
                }
            }
        }
        Ok(())
    }

    /// The restriction to the centre in the generators `q^p, p^p, y`.
    pub fn centre_system(&self) -> Result<PolyAutomorphism> {
        let r = &self.ring;
        let p = r.prime().get();
        let images = self
            .q_images
            .iter()
            .chain(&self.p_images)
            .map(|g| r.central_to_poly(&r.pow(g, p)))
            .chain(self.y_images.iter().map(|y| r.central_to_poly(y)))
            .collect::<Result<Vec<_>>>()?;
        PolyAutomorphism::new(images).map_err(|e| Error::CentreNotAutomorphism(e.to_string()))
    }

    pub fn apply(&self, a: &WeylElement) -> Result<WeylElement> {
        let r = &self.ring;
        if *a.ring() != *r {
            return Err(Error::ContextMismatch("element and automorphism algebras differ".into()));
        }
        let gens: Vec<&WeylElement> = self.q_images.iter().chain(&self.p_images).chain(&self.y_images).collect();
        let mut powers: Vec<Vec<WeylElement>> = vec![vec![r.one()]; gens.len()];
        let mut acc = r.zero();
        for (key, &c) in a.terms() {
            let mut t = r.scalar(c);
            for (g, &e) in key.exps().iter().enumerate() {
                while powers[g].len() <= e as usize {
                    let next = r.mul(powers[g].last().unwrap(), gens[g]);
                    powers[g].push(next);
                }
                if e > 0 {
                    t = r.mul(&t, &powers[g][e as usize]);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `self o other`.
    pub fn compose(&self, other: &WeylAutomorphism) -> Result<WeylAutomorphism> {
        let map = |v: &[WeylElement]| v.iter().map(|e| self.apply(e)).collect::<Result<Vec<_>>>();
        WeylAutomorphism::new(self.ring.clone(), map(&other.q_images)?, map(&other.p_images)?, map(&other.y_images)?)
    }

    /// `(name, generator, image)` for every generator.
    pub fn generators(&self) -> Vec<(String, WeylElement, WeylElement)> {
        let r = &self.ring;
        let mut out = Vec::new();
        for i in 0..r.n() {
            out.push((format!("q{}", i + 1), r.q(i), self.q_images[i].clone()));
        }
        for i in 0..r.n() {
            out.push((format!("p{}", i + 1), r.p(i), self.p_images[i].clone()));
        }
        for j in 0..r.m() {
            out.push((format!("y{}", j + 1), r.y(j), self.y_images[j].clone()));
        }
        out
    }
}

/// `sigma^{-1}(g) = sum sigma_Z^{-1}(z_(alpha beta)) q^alpha p^beta` with
/// `g = sum z_(alpha beta) q'^alpha p'^beta`.
pub struct WeylInverter<'a> {
    aut: &'a WeylAutomorphism,
    centre: CoordinateEngine,
}

impl<'a> WeylInverter<'a> {
    pub fn new(aut: &'a WeylAutomorphism) -> Result<Self> {
        Ok(WeylInverter { aut, centre: aut.centre_system()?.engine() })
    }

    pub fn apply(&self, g: &WeylElement) -> Result<WeylElement> {
        let r = self.aut.ring();
        let zero_m = vec![0; r.m()];
        let mut acc = r.zero();
        for ((al, be), z) in WeylFrame::twisted(self.aut).coordinates(g, false)? {
            let z = r.poly_to_central(&self.centre.coordinates(&r.central_to_poly(&z)?)?);
            acc = &acc + &r.mul(&r.monomial(&al, &be, &zero_m, 1)?, &z);
        }
        Ok(acc)
    }
}

/// The inverse automorphism, verified on every generator in both orders.
pub fn invert_weyl_aut(aut: &WeylAutomorphism) -> Result<WeylAutomorphism> {
    let inv = WeylInverter::new(aut)?;
    let r = aut.ring();
    let n = r.n();
    let gens = aut.generators();
    let mut images = gens.iter().map(|(_, g, _)| inv.apply(g)).collect::<Result<Vec<_>>>()?.into_iter();
    let q: Vec<_> = images.by_ref().take(n).collect();
    let p: Vec<_> = images.by_ref().take(n).collect();
    let y: Vec<_> = images.collect();
    let failed = || Error::VerificationFailed("not an automorphism or insufficient data".into());
    let tau = WeylAutomorphism::new(r.clone(), q, p, y).map_err(|_| failed())?;
    for (_, g, img) in &gens {
        if aut.apply(&tau.apply(g)?)? != *g || tau.apply(img)? != *g {
            return Err(failed());
        }
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primefield::PrimeChar;

    fn ring(p: u64, n: usize, m: usize) -> WeylRing {
        WeylRing::new(PrimeChar::new(p).unwrap(), n, m)
    }

    #[test]
    fn symplectic_shear_inverse() {
        for p in [2, 3, 5] {
            let r = ring(p, 1, 0);
            let s = WeylAutomorphism::new(r.clone(), vec![r.q(0)], vec![&r.p(0) + &r.q(0)], vec![]).unwrap();
            let t = invert_weyl_aut(&s).unwrap();
            assert_eq!(t.p_images()[0], &r.p(0) - &r.q(0));
            assert!(s.compose(&t).unwrap().is_identity());
        }
    }

    #[test]
    fn scaling_inverse() {
        let r = ring(7, 1, 0);
        let s = WeylAutomorphism::new(r.clone(), vec![r.q(0).scale(3)], vec![r.p(0).scale(5)], vec![]).unwrap();
        let t = invert_weyl_aut(&s).unwrap();
        assert_eq!(t.q_images()[0], r.q(0).scale(5));
        assert_eq!(t.p_images()[0], r.p(0).scale(3));
    }

    #[test]
    fn nonlinear_with_coefficients() {
        // q -> q + y p^2, p -> p, y -> y + 1 over p = 3.
        let r = ring(3, 1, 1);
        let q2 = &r.q(0) + &(&r.y(0) * &r.pow(&r.p(0), 2));
        let s = WeylAutomorphism::new(r.clone(), vec![q2], vec![r.p(0)], vec![&r.y(0) + &r.one()]).unwrap();
        let t = invert_weyl_aut(&s).unwrap();
        assert!(t.compose(&s).unwrap().is_identity());
    }

    #[test]
    fn relation_failure() {
        let r = ring(3, 1, 0);
        let bad = WeylAutomorphism::new(r.clone(), vec![r.q(0)], vec![r.p(0).scale(2)], vec![]);
        assert!(matches!(bad, Err(Error::RelationViolation(_))));
    }
}
