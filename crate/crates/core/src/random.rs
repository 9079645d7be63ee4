//! Seeded random elements and automorphisms for sampling and tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cli::session::{Element, Session};
use crate::csa::{CSAutomorphism, StructureConstantAlgebra};
use crate::diffop::{DiffOpAutomorphism, DiffOpElement, DiffOpRing};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::monomial::Monomial;
use crate::multipoly::{MultiPoly, PolyAutomorphism};
use crate::powerseries::TruncatedSeries;
use crate::primefield::PrimeChar;
use crate::weyl::{WeylAutomorphism, WeylElement, WeylRing};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exps(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Vec<u32> {
    let mut left = max_deg;
    let mut e = vec![0; n];
    for i in rand::seq::index::sample(rng, n, n).into_iter() {
        let v = rng.gen_range(0..=left);
        e[i] = v;
        left -= v;
    }
    e
}

fn coeff(rng: &mut ChaCha8Rng, p: PrimeChar) -> u64 {
    rng.gen_range(1..p.get())
}

/// Up to `nterms` terms of total degree `<= max_deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, p: PrimeChar, n: usize, max_deg: u32, nterms: usize) -> MultiPoly {
    let terms: Vec<(Monomial, u64)> =
        (0..nterms).map(|_| (Monomial::new(exps(rng, n, max_deg)), coeff(rng, p))).collect();
    MultiPoly::from_terms(p, n, terms)
}

/// Terms `x^alpha d^[beta] y^gamma` with `|alpha| + |gamma| <= max_deg`, `|beta| <= max_order`,
/// and divided powers inside `T_k` when the ring is truncated.
pub fn random_diffop(rng: &mut ChaCha8Rng, ring: &DiffOpRing, max_deg: u32, max_order: u32, nterms: usize) -> DiffOpElement {
    let (n, m) = (ring.nx(), ring.ny());
    let mut acc = ring.zero();
    for _ in 0..nterms {
        let xy = exps(rng, n + m, max_deg);
        let mut beta = exps(rng, n, max_order);
        for (i, b) in beta.iter_mut().enumerate() {
            if let Some(lim) = ring.dpow_limit(i) {
                *b = (*b as u64 % lim) as u32;
            }
        }
        let t = ring.monomial(&xy[..n], &beta, &xy[n..], coeff(rng, ring.prime())).expect("inside T_k");
        acc = &acc + &t;
    }
    acc
}

/// Terms `q^alpha p^beta y^gamma` of total degree `<= max_deg`.
pub fn random_weyl(rng: &mut ChaCha8Rng, ring: &WeylRing, max_deg: u32, nterms: usize) -> WeylElement {
    let (n, m) = (ring.n(), ring.m());
    let mut acc = ring.zero();
    for _ in 0..nterms {
        let e = exps(rng, 2 * n + m, max_deg);
        let t = ring.monomial(&e[..n], &e[n..2 * n], &e[2 * n..], coeff(rng, ring.prime())).expect("sizes match");
        acc = &acc + &t;
    }
    acc
}

pub fn random_vector(rng: &mut ChaCha8Rng, p: PrimeChar, dim: usize) -> Vec<u64> {
    (0..dim).map(|_| rng.gen_range(0..p.get())).collect()
}

/// A small element of the session algebra.
pub fn random_element(rng: &mut ChaCha8Rng, session: &Session) -> Element {
    match session {
        Session::Poly { p, n } => Element::Poly(random_poly(rng, *p, *n, 4, 4)),
        Session::Series { p, n, bound } => {
            Element::Series(TruncatedSeries::new(random_poly(rng, *p, *n, (*bound).min(6) as u32, 4), *bound))
        }
        Session::DiffOp { ring, .. } => Element::DiffOp(random_diffop(rng, ring, 3, 3, 3)),
        Session::Weyl(ring) => Element::Weyl(random_weyl(rng, ring, 4, 3)),
        Session::Csa(alg) => Element::Csa(random_vector(rng, alg.prime(), alg.dim())),
    }
}

/// `x_i -> c_i x_i + f_i(x_1..x_{i-1})` with `c_i != 0` and `deg f_i <= max_deg`.
pub fn random_triangular(rng: &mut ChaCha8Rng, p: PrimeChar, n: usize, max_deg: u32) -> PolyAutomorphism {
    let images = (0..n)
        .map(|i| {
            let lead = MultiPoly::var(p, n, i).scale(coeff(rng, p));
            if i == 0 {
                return &lead + &MultiPoly::constant(p, n, rng.gen_range(0..p.get()));
            }
            let f = random_poly(rng, p, i, max_deg, 3).embed(n, 0);
            &lead + &f
        })
        .collect();
    PolyAutomorphism::new(images).expect("triangular maps are automorphisms")
}

/// A product of elementary and diagonal matrices.
pub fn random_invertible_matrix(rng: &mut ChaCha8Rng, p: PrimeChar, r: usize) -> Matrix {
    let mut m = linalg::identity(r);
    for _ in 0..2 * r + 1 {
        let mut e = linalg::identity(r);
        if r > 1 && rng.gen_bool(0.6) {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            e[i][j] = coeff(rng, p);
        } else {
            let i = rng.gen_range(0..r);
            e[i][i] = coeff(rng, p);
        }
        m = linalg::mat_mul(p, &m, &e);
    }
    m
}

/// A composition of shears `x_i -> x_i + c x_j` and diagonal scalings of `D(P_n)`.
pub fn random_linear_diffop(rng: &mut ChaCha8Rng, ring: &DiffOpRing, levels: usize, factors: usize) -> Result<DiffOpAutomorphism> {
    let (p, n) = (ring.prime(), ring.nx());
    let mut aut = DiffOpAutomorphism::identity(ring, levels)?;
    for _ in 0..factors {
        let mut e = linalg::identity(n);
        if n > 1 && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            e[i][j] = coeff(rng, p);
        } else {
            let i = rng.gen_range(0..n);
            e[i][i] = coeff(rng, p);
        }
        aut = aut.compose(&DiffOpAutomorphism::from_linear(ring, &e, levels)?)?;
    }
    Ok(aut)
}

fn small_poly_in(rng: &mut ChaCha8Rng, ring: &WeylRing, g: &WeylElement) -> WeylElement {
    let p = ring.prime().get();
    let mut acc = ring.zero();
    for e in 0..p {
        if rng.gen_bool(0.5) {
            let mut t = ring.pow(g, e).scale(rng.gen_range(0..p));
            if ring.m() > 0 && rng.gen_bool(0.3) {
                t = ring.mul(&t, &ring.y(0));
            }
            acc = &acc + &t;
        }
    }
    acc
}

/// One of: `q -> q + f(p)`, `p -> p + f(q)` with `deg f < p` (coefficients may
/// involve `y_1`), `q -> a q, p -> a^{-1} p`, or `y_1 -> a y_1 + b`.
pub fn random_weyl_generator(rng: &mut ChaCha8Rng, ring: &WeylRing) -> WeylAutomorphism {
    let pc = ring.prime();
    let mut q: Vec<WeylElement> = (0..ring.n()).map(|i| ring.q(i)).collect();
    let mut pp: Vec<WeylElement> = (0..ring.n()).map(|i| ring.p(i)).collect();
    let mut y: Vec<WeylElement> = (0..ring.m()).map(|j| ring.y(j)).collect();
    let i = rng.gen_range(0..ring.n());
    match rng.gen_range(0..if ring.m() > 0 { 4 } else { 3 }) {
        0 => q[i] = &q[i] + &small_poly_in(rng, ring, &ring.p(i)),
        1 => pp[i] = &pp[i] + &small_poly_in(rng, ring, &ring.q(i)),
        2 => {
            let a = coeff(rng, pc);
            q[i] = q[i].scale(a);
            pp[i] = pp[i].scale(pc.inv(a).expect("nonzero"));
        }
        _ => {
            let a = coeff(rng, pc);
            y[0] = &ring.y(0).scale(a) + &ring.scalar(rng.gen_range(0..pc.get()));
        }
    }
    WeylAutomorphism::new(ring.clone(), q, pp, y).expect("elementary Weyl automorphism")
}

pub fn random_weyl_aut(rng: &mut ChaCha8Rng, ring: &WeylRing, factors: usize) -> Result<WeylAutomorphism> {
    let mut aut = WeylAutomorphism::identity(ring);
    for _ in 0..factors {
        aut = aut.compose(&random_weyl_generator(rng, ring))?;
    }
    Ok(aut)
}

/// `x -> s x s^{-1}` for a random invertible `s`; also returns `s`.
pub fn random_conjugation(rng: &mut ChaCha8Rng, alg: &StructureConstantAlgebra) -> Result<(CSAutomorphism, Matrix)> {
    let r = alg.matrix_size().expect("matrix algebra");
    let s = random_invertible_matrix(rng, alg.prime(), r);
    Ok((CSAutomorphism::conjugation(alg, &s)?, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let p = PrimeChar::new(5).unwrap();
        let a = random_poly(&mut rng(7), p, 2, 4, 5);
        let b = random_poly(&mut rng(7), p, 2, 4, 5);
        assert_eq!(a, b);
        assert!(a.degree().unwrap_or(0) <= 4);
    }

    #[test]
    fn generators_are_automorphisms() {
        let mut g = rng(1);
        for p in [2, 3] {
            let ring = WeylRing::new(PrimeChar::new(p).unwrap(), 1, 1);
            for _ in 0..10 {
                random_weyl_aut(&mut g, &ring, 3).unwrap();
            }
            let pc = PrimeChar::new(p).unwrap();
            let m = random_invertible_matrix(&mut g, pc, 3);
            assert_eq!(linalg::rank(pc, &m), 3);
        }
    }
}
