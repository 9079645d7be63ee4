//! Inversion of differential-operator automorphisms from the twisted
//! projections.

use crate::error::{Error, Result};

use super::projection::{DiffOpFrame, Side};
use super::{DiffOpAutomorphism, DiffOpElement};

/// `sigma^{-1}(g) = sum sigma_Z^{-1}(z_{alpha beta}) x^alpha d^[beta]` where
/// `g = sum z_{alpha beta} x'^alpha d'^[beta]` in the frame of `sigma`, and
/// `sigma_Z` is the restriction to the centre.
pub struct DiffOpInverter<'a> {
    aut: &'a DiffOpAutomorphism,
    centre: Option<crate::multipoly::CoordinateEngine>,
}

impl<'a> DiffOpInverter<'a> {
    pub fn new(aut: &'a DiffOpAutomorphism) -> Result<Self> {
        let centre = aut.centre_restriction()?.map(|c| c.engine());
        Ok(DiffOpInverter { aut, centre })
    }

    fn centre_inverse(&self, z: &DiffOpElement) -> Result<DiffOpElement> {
        let r = self.aut.ring();
        match &self.centre {
            None => Ok(z.clone()),
            Some(engine) => Ok(r.poly_to_central(&engine.coordinates(&r.central_to_poly(z)?)?)),
        }
    }

    pub fn apply(&self, g: &DiffOpElement) -> Result<DiffOpElement> {
        let r = self.aut.ring();
        let frame = DiffOpFrame::twisted(self.aut);
        let mut acc = r.zero();
        for ((alpha, beta), z) in frame.coordinates(g, Side::Right)? {
            acc = &acc + &r.basis_times(&alpha, &beta, &self.centre_inverse(&z)?)?;
        }
        Ok(acc)
    }
}

fn insufficient() -> Error {
    Error::VerificationFailed("not an automorphism or insufficient data".into())
}

/// The inverse automorphism, verified on every generator in both orders.
pub fn invert_diffop_aut(aut: &DiffOpAutomorphism) -> Result<DiffOpAutomorphism> {
    let inv = DiffOpInverter::new(aut)?;
    let r = aut.ring();
    let gens = aut.generators();
    let images = gens.iter().map(|(_, g, _)| inv.apply(g)).collect::<Result<Vec<_>>>()?;
    let n = r.nx();
    let mut it = images.into_iter();
    let x: Vec<_> = it.by_ref().take(n).collect();
    let d: Vec<Vec<_>> = (0..n).map(|i| it.by_ref().take(aut.levels(i)).collect()).collect();
    let y: Vec<_> = it.collect();
    let tau = DiffOpAutomorphism::new(r.clone(), x, d, y).map_err(|e| match e {
        Error::RelationViolation(_) => insufficient(),
        other => other,
    })?;
    for (_, g, img) in &gens {
        if aut.apply(&tau.apply(g)?)? != *g || tau.apply(img)? != *g {
            return Err(insufficient());
        }
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::DiffOpRing;
    use crate::primefield::PrimeChar;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn identity_inverse() {
        let r = DiffOpRing::plain(pc(3), 2);
        let id = DiffOpAutomorphism::identity(&r, 2).unwrap();
        assert!(invert_diffop_aut(&id).unwrap().is_identity());
    }

    #[test]
    fn shear_inverse_is_opposite_shear() {
        for p in [2, 3, 5] {
            let r = DiffOpRing::plain(pc(p), 2);
            let s = DiffOpAutomorphism::from_linear(&r, &[vec![1, 0], vec![1, 1]], 2).unwrap();
            let t = DiffOpAutomorphism::from_linear(&r, &[vec![1, 0], vec![p - 1, 1]], 2).unwrap();
            assert_eq!(invert_diffop_aut(&s).unwrap(), t, "p={p}");
        }
    }

    #[test]
    fn induced_triangular_inverse() {
        use crate::multipoly::{invert_poly_aut, MultiPoly, PolyAutomorphism};
        let p = pc(3);
        let r = DiffOpRing::plain(p, 2);
        let (x1, x2) = (MultiPoly::var(p, 2, 0), MultiPoly::var(p, 2, 1));
        let tau = PolyAutomorphism::new(vec![x1.clone(), &x2 + &x1.pow(2)]).unwrap();
        let s = DiffOpAutomorphism::from_poly_automorphism(&r, &tau, 2).unwrap();
        let t = DiffOpAutomorphism::from_poly_automorphism(&r, &invert_poly_aut(&tau).unwrap(), 2).unwrap();
        assert_eq!(invert_diffop_aut(&s).unwrap(), t);
    }

    #[test]
    fn shear_with_three_levels() {
        let r = DiffOpRing::plain(pc(5), 2);
        let s = DiffOpAutomorphism::from_linear(&r, &[vec![1, 0], vec![1, 1]], 3).unwrap();
        let t = invert_diffop_aut(&s).unwrap();
        assert!(s.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn truncated_translation_inverse() {
        let r = DiffOpRing::new(pc(3), 1, 1, Some(vec![1])).unwrap();
        let s = DiffOpAutomorphism::new(
            r.clone(),
            vec![&r.x(0) + &r.y(0)],
            vec![vec![r.d(0, 1).unwrap()]],
            vec![&r.y(0) + &r.scalar(2)],
        )
        .unwrap();
        let t = invert_diffop_aut(&s).unwrap();
        assert_eq!(t.x_images()[0], &(&r.x(0) - &r.y(0)) + &r.scalar(2));
        assert_eq!(t.y_images()[0], &r.y(0) - &r.scalar(2));
    }
}
