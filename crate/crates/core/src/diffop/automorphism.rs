//! Automorphisms given by the images of `x_i`, `d_i^[p^s]` and `y_j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use crate::descent::Algebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::monomial::vectors_of_degree;
use crate::multipoly::{invert_poly_aut, MultiPoly, PolyAutomorphism};

use super::{DiffOpElement, DiffOpRing};

/// An automorphism datum: images of `x_i`, of `d_i^[p^s]` for `s < levels[i]`,
/// and of the central `y_j`, validated against the defining relations.
pub struct DiffOpAutomorphism {
    ring: DiffOpRing,
    x_images: Vec<DiffOpElement>,
    dpow_images: Vec<Vec<DiffOpElement>>,
    y_images: Vec<DiffOpElement>,
    composites: RwLock<HashMap<(usize, u64), DiffOpElement>>,
}

impl Clone for DiffOpAutomorphism {
    fn clone(&self) -> Self {
        DiffOpAutomorphism {
            ring: self.ring.clone(),
            x_images: self.x_images.clone(),
            dpow_images: self.dpow_images.clone(),
            y_images: self.y_images.clone(),
            composites: RwLock::new(self.composites.read().unwrap().clone()),
        }
    }
}

impl PartialEq for DiffOpAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.x_images == other.x_images
            && self.dpow_images == other.dpow_images
            && self.y_images == other.y_images
    }
}

impl fmt::Debug for DiffOpAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffOpAutomorphism")
            .field("x_images", &self.x_images)
            .field("dpow_images", &self.dpow_images)
            .field("y_images", &self.y_images)
            .finish()
    }
}

/// `sigma(d_i^[k])` assembled from the prime-power images.
pub fn composite_divided_power(aut: &DiffOpAutomorphism, i: usize, k: u64) -> Result<DiffOpElement> {
    aut.composite(i, k)
}

fn gen_name(kind: char, i: usize) -> String {
    format!("{}{}'", kind, i + 1)
}

impl DiffOpAutomorphism {
    pub fn new(
        ring: DiffOpRing,
        x_images: Vec<DiffOpElement>,
        dpow_images: Vec<Vec<DiffOpElement>>,
        y_images: Vec<DiffOpElement>,
    ) -> Result<Self> {
        let aut = Self::unchecked(ring, x_images, dpow_images, y_images)?;
        aut.validate()?;
        Ok(aut)
    }

    pub(crate) fn unchecked(
        ring: DiffOpRing,
        x_images: Vec<DiffOpElement>,
        dpow_images: Vec<Vec<DiffOpElement>>,
        y_images: Vec<DiffOpElement>,
    ) -> Result<Self> {
        let (n, m) = (ring.nx(), ring.ny());
        if x_images.len() != n || dpow_images.len() != n || y_images.len() != m {
            return Err(Error::ContextMismatch("wrong number of generator images".into()));
        }
        let all = x_images.iter().chain(dpow_images.iter().flatten()).chain(&y_images);
        if all.clone().any(|e| *e.ring() != ring) {
            return Err(Error::ContextMismatch("image from a different algebra".into()));
        }
        for (i, lv) in dpow_images.iter().enumerate() {
            match ring.order_bound() {
                Some(k) if lv.len() != k[i] as usize => {
                    return Err(Error::InvalidConfig(format!(
                        "T_k needs exactly {} divided-power images for variable {}",
                        k[i],
                        i + 1
                    )))
                }
                _ if lv.is_empty() => {
                    return Err(Error::InvalidConfig("at least one divided-power level is required".into()))
                }
                _ => {}
            }
        }
        Ok(DiffOpAutomorphism { ring, x_images, dpow_images, y_images, composites: RwLock::new(HashMap::new()) })
    }

    pub fn identity(ring: &DiffOpRing, levels: usize) -> Result<Self> {
        let p = ring.prime().get();
        let dp = (0..ring.nx())
            .map(|i| {
                let lv = ring.order_bound().map_or(levels, |k| k[i] as usize);
                (0..lv).map(|s| ring.d(i, p.pow(s as u32) as u32)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            ring.clone(),
            (0..ring.nx()).map(|i| ring.x(i)).collect(),
            dp,
            (0..ring.ny()).map(|j| ring.y(j)).collect(),
        )
    }

    /// The linear change of variables `x -> A x`, `d -> (A^{-1})^T d`
    /// (with divided powers of linear forms), fixing every `y_j`.
    pub fn from_linear(ring: &DiffOpRing, a: &[Vec<u64>], levels: usize) -> Result<Self> {
        let (p, n) = (ring.prime(), ring.nx());
        if ring.is_truncated() {
            return Err(Error::InvalidConfig("linear changes of variables are not defined on T_k in general".into()));
        }
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::ContextMismatch("matrix size does not match n".into()));
        }
        let a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| p.reduce(v)).collect()).collect();
        let b = linalg::transpose(&linalg::inverse(p, &a).map_err(|_| Error::NotAutomorphism("singular matrix".into()))?);
        let x_images = (0..n)
            .map(|i| (0..n).fold(ring.zero(), |acc, j| &acc + &ring.x(j).scale(a[i][j])))
            .collect();
        let mut dpow_images = Vec::with_capacity(n);
        for row in &b {
            let mut lv = Vec::with_capacity(levels);
            for s in 0..levels {
                let k = p.get().pow(s as u32) as u32;
                let mut acc = ring.zero();
                for beta in vectors_of_degree(n, k) {
                    let c = beta.iter().zip(row).fold(1, |c, (&e, &r)| p.mul(c, p.pow(r, e as u64)));
                    if c != 0 {
                        acc = &acc + &ring.d_multi(&beta)?.scale(c);
                    }
                }
                lv.push(acc);
            }
            dpow_images.push(lv);
        }
        let y_images = (0..ring.ny()).map(|j| ring.y(j)).collect();
        Self::new(ring.clone(), x_images, dpow_images, y_images)
    }

    /// The automorphism of `D(P_n)` induced by a polynomial automorphism `tau`:
    /// `D -> tau o D o tau^{-1}` as operators on `P_n`.
    pub fn from_poly_automorphism(ring: &DiffOpRing, tau: &PolyAutomorphism, levels: usize) -> Result<Self> {
        let (p, n) = (ring.prime(), ring.nx());
        if ring.is_truncated() || ring.ny() != 0 || tau.nvars() != n || tau.prime() != p {
            return Err(Error::InvalidConfig("induced automorphisms need D(P_n) with matching n and p".into()));
        }
        let inv = invert_poly_aut(tau)?;
        let x_images = tau.images().iter().map(|f| poly_to_diffop(ring, f)).collect();
        let mut dpow_images = Vec::with_capacity(n);
        for i in 0..n {
            let mut lv = Vec::with_capacity(levels);
            for s in 0..levels {
                let k = p.get().pow(s as u32) as u32;
                let mut beta = vec![0; n];
                beta[i] = k;
                let op = |f: &MultiPoly| -> Result<MultiPoly> { tau.apply(&inv.apply(f)?.divided_derivative(&beta)) };
                lv.push(operator_from_action(ring, &op, k)?);
            }
            dpow_images.push(lv);
        }
        Self::new(ring.clone(), x_images, dpow_images, Vec::new())
    }

    pub fn ring(&self) -> &DiffOpRing {
        &self.ring
    }

    pub fn x_images(&self) -> &[DiffOpElement] {
        &self.x_images
    }

    pub fn dpow_images(&self) -> &[Vec<DiffOpElement>] {
        &self.dpow_images
    }

    pub fn y_images(&self) -> &[DiffOpElement] {
        &self.y_images
    }

    /// Number of supplied prime-power levels for variable `i`.
    pub fn levels(&self, i: usize) -> usize {
        self.dpow_images[i].len()
    }

    pub fn min_levels(&self) -> usize {
        self.dpow_images.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        let r = &self.ring;
        let p = r.prime().get();
        self.x_images.iter().enumerate().all(|(i, e)| *e == r.x(i))
            && self.y_images.iter().enumerate().all(|(j, e)| *e == r.y(j))
            && self
                .dpow_images
                .iter()
                .enumerate()
                .all(|(i, lv)| lv.iter().enumerate().all(|(s, e)| Ok(e.clone()) == r.d(i, p.pow(s as u32) as u32)))
    }

    /// `sigma(d_i^[k]) = prod_s sigma(d_i^[p^s])^(d_s) / d_s!` over the base-p digits of `k`.
    pub fn composite(&self, i: usize, k: u64) -> Result<DiffOpElement> {
        if let Some(v) = self.composites.read().unwrap().get(&(i, k)) {
            return Ok(v.clone());
        }
        let r = &self.ring;
        let p = r.prime();
        if let Some(lim) = r.dpow_limit(i) {
            if k >= lim {
                return Ok(r.zero());
            }
        }
        let mut acc = r.one();
        let (mut rest, mut s) = (k, 0usize);
        while rest > 0 {
            let d = rest % p.get();
            if d > 0 {
                let g = self.dpow_images[i].get(s).ok_or(Error::InsufficientLevels { level: s as u32 })?;
                acc = &acc * &r.pow(g, d).scale(p.factorial_inv(d)?);
            }
            rest /= p.get();
            s += 1;
        }
        self.composites.write().unwrap().insert((i, k), acc.clone());
        Ok(acc)
    }

    /// `sigma(d^[beta])`.
    pub fn composite_multi(&self, beta: &[u32]) -> Result<DiffOpElement> {
        let mut acc = self.ring.one();
        for (i, &b) in beta.iter().enumerate() {
            if b > 0 {
                acc = &acc * &self.composite(i, b as u64)?;
            }
        }
        Ok(acc)
    }

    fn validate(&self) -> Result<()> {
        let r = &self.ring;
        let p = r.prime();
        let (n, m) = (r.nx(), r.ny());
        let fail = |what: String| Err(Error::RelationViolation(what));
        for i in 0..n {
            for j in i + 1..n {
                if !r.commutator(&self.x_images[i], &self.x_images[j]).is_zero() {
                    return fail(format!("[{}, {}] != 0", gen_name('x', i), gen_name('x', j)));
                }
            }
        }
        let dps: Vec<(usize, usize, &DiffOpElement)> = self
            .dpow_images
            .iter()
            .enumerate()
            .flat_map(|(i, lv)| lv.iter().enumerate().map(move |(s, e)| (i, s, e)))
            .collect();
        let dname = |i: usize, s: usize| format!("D{}[{}]'", i + 1, p.get().pow(s as u32));
        for (a, &(i, s, e)) in dps.iter().enumerate() {
            for &(j, t, f) in &dps[a + 1..] {
                if !r.commutator(e, f).is_zero() {
                    return fail(format!("[{}, {}] != 0", dname(i, s), dname(j, t)));
                }
            }
            for j in 0..n {
                let lhs = r.commutator(e, &self.x_images[j]);
                let rhs = if i == j { self.composite(i, p.get().pow(s as u32) - 1)? } else { r.zero() };
                if lhs != rhs {
                    let want = if i == j { format!("D{}[{}]'", i + 1, p.get().pow(s as u32) - 1) } else { "0".into() };
                    return fail(format!("[{}, {}] != {}", dname(i, s), gen_name('x', j), want));
                }
            }
            if !r.pow(e, p.get()).is_zero() {
                return fail(format!("({})^{} != 0", dname(i, s), p));
            }
        }
        for j in 0..m {
            if !r.is_central(&self.y_images[j]) {
                return fail(format!("{} is not central", gen_name('y', j)));
            }
        }
        if let Some(k) = r.order_bound() {
            for i in 0..n {
                let fr = r.pow(&self.x_images[i], p.get().pow(k[i]));
                if !r.is_central(&fr) {
                    return fail(format!("{}^{} is not central", gen_name('x', i), p.get().pow(k[i])));
                }
            }
        }
        self.check_composites()
    }

    fn check_composites(&self) -> Result<()> {
        let r = &self.ring;
        let p = r.prime().get();
        for i in 0..r.nx() {
            let top = r.dpow_limit(i).unwrap_or_else(|| p.pow(self.levels(i) as u32));
            let mut samples: Vec<u64> = vec![1, 2, p - 1, p, p + 1];
            samples.extend((1..=self.levels(i) as u32).map(|s| p.pow(s) - 1));
            samples.retain(|&k| k >= 1 && k < top);
            samples.sort_unstable();
            samples.dedup();
            for &k in &samples {
                for &l in &samples {
                    if k + l >= top {
                        continue;
                    }
                    let lhs = &self.composite(i, k)? * &self.composite(i, l)?;
                    let rhs = self.composite(i, k + l)?.scale(r.prime().binom(k + l, k));
                    if lhs != rhs {
                        return Err(Error::RelationViolation(format!(
                            "D{i1}[{k}]' D{i1}[{l}]' != C({kl},{k}) D{i1}[{kl}]'",
                            i1 = i + 1,
                            kl = k + l
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The homomorphism extending the generator images.
    pub fn apply(&self, a: &DiffOpElement) -> Result<DiffOpElement> {
        let r = &self.ring;
        if *a.ring() != *r {
            return Err(Error::ContextMismatch("element and automorphism algebras differ".into()));
        }
        let mut xp: Vec<Vec<DiffOpElement>> = vec![vec![r.one()]; r.nx()];
        let mut yp: Vec<Vec<DiffOpElement>> = vec![vec![r.one()]; r.ny()];
        let mut acc = r.zero();
        for (key, &c) in a.terms() {
            let (al, be, ga) = r.split(key);
            let mut t = r.scalar(c);
            for (i, &e) in al.iter().enumerate() {
                t = &t * power_cached(r, &mut xp[i], &self.x_images[i], e);
            }
            t = &t * &self.composite_multi(be)?;
            for (j, &e) in ga.iter().enumerate() {
                t = &t * power_cached(r, &mut yp[j], &self.y_images[j], e);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `self o other`.
    pub fn compose(&self, other: &DiffOpAutomorphism) -> Result<DiffOpAutomorphism> {
        if self.ring != other.ring {
            return Err(Error::ContextMismatch("composing automorphisms of different algebras".into()));
        }
        let levels = self.min_levels().min(other.min_levels());
        let x = other.x_images.iter().map(|e| self.apply(e)).collect::<Result<Vec<_>>>()?;
        let d = other
            .dpow_images
            .iter()
            .map(|lv| lv.iter().take(levels.max(1)).map(|e| self.apply(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let d = if self.ring.is_truncated() {
            other.dpow_images.iter().map(|lv| lv.iter().map(|e| self.apply(e)).collect()).collect::<Result<Vec<_>>>()?
        } else {
            d
        };
        let y = other.y_images.iter().map(|e| self.apply(e)).collect::<Result<Vec<_>>>()?;
        DiffOpAutomorphism::new(self.ring.clone(), x, d, y)
    }

    /// All generators `(name, standard element, image)`.
    pub fn generators(&self) -> Vec<(String, DiffOpElement, DiffOpElement)> {
        let r = &self.ring;
        let p = r.prime().get();
        let mut out = Vec::new();
        for i in 0..r.nx() {
            out.push((format!("x{}", i + 1), r.x(i), self.x_images[i].clone()));
        }
        for (i, lv) in self.dpow_images.iter().enumerate() {
            for (s, e) in lv.iter().enumerate() {
                let k = p.pow(s as u32) as u32;
                out.push((format!("D{}[{}]", i + 1, k), r.d(i, k).expect("supplied level"), e.clone()));
            }
        }
        for j in 0..r.ny() {
            out.push((format!("y{}", j + 1), r.y(j), self.y_images[j].clone()));
        }
        out
    }

    /// The restriction to the centre, as a polynomial automorphism of the
    /// centre generators (`None` for `D(P_n)`, whose centre is `K`).
    pub fn centre_restriction(&self) -> Result<Option<PolyAutomorphism>> {
        let r = &self.ring;
        if r.centre_nvars() == 0 {
            return Ok(None);
        }
        let mut images = Vec::new();
        if let Some(k) = r.order_bound() {
            let p = r.prime().get();
            for (i, x) in self.x_images.iter().enumerate() {
                images.push(r.central_to_poly(&r.pow(x, p.pow(k[i])))?);
            }
        }
        for y in &self.y_images {
            images.push(r.central_to_poly(y)?);
        }
        PolyAutomorphism::new(images).map(Some).map_err(|e| Error::CentreNotAutomorphism(e.to_string()))
    }
}

fn power_cached<'c>(
    r: &DiffOpRing,
    cache: &'c mut Vec<DiffOpElement>,
    base: &DiffOpElement,
    e: u32,
) -> &'c DiffOpElement {
    while cache.len() <= e as usize {
        let next = r.mul(cache.last().unwrap(), base);
        cache.push(next);
    }
    &cache[e as usize]
}

/// A polynomial in `x_1..x_n` as a multiplication operator.
pub(crate) fn poly_to_diffop(ring: &DiffOpRing, f: &MultiPoly) -> DiffOpElement {
    let n = ring.nx();
    let zero_n = vec![0; n];
    let zero_m = vec![0; ring.ny()];
    let mut acc = ring.zero();
    for (m, &c) in f.terms() {
        acc = &acc + &ring.monomial(m.exps(), &zero_n, &zero_m, c).expect("no divided powers");
    }
    acc
}

/// Recovers `sum_beta c_beta(x) d^[beta]` (with `|beta| <= order`) from its
/// action on `P_n`, using `D(x^beta) = sum_{beta' <= beta} C(beta, beta') c_beta' x^(beta - beta')`.
pub(crate) fn operator_from_action(
    ring: &DiffOpRing,
    op: &dyn Fn(&MultiPoly) -> Result<MultiPoly>,
    order: u32,
) -> Result<DiffOpElement> {
    let (p, n) = (ring.prime(), ring.nx());
    let mut acc = ring.zero();
    for d in 0..=order {
        for beta in vectors_of_degree(n, d) {
            let probe = MultiPoly::monomial(p, beta.clone().into(), 1);
            let known = ring.act_on(&acc, &probe)?;
            let coeff = &op(&probe)? - &known;
            let c = poly_to_diffop(ring, &coeff);
            acc = &acc + &(&c * &ring.d_multi(&beta)?);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primefield::PrimeChar;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    /// x1 -> x1, x2 -> x2 + c x1, d1^[k] -> sum_{a+b=k} (-c)^b d1^[a] d2^[b], d2 fixed.
    fn shear(ring: &DiffOpRing, c: u64, levels: usize) -> DiffOpAutomorphism {
        let p = ring.prime();
        let mc = p.neg(p.reduce(c));
        let x = vec![ring.x(0), &ring.x(1) + &ring.x(0).scale(c)];
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for s in 0..levels {
            let k = p.get().pow(s as u32) as u32;
            let mut acc = ring.zero();
            for b in 0..=k {
                acc = &acc + &ring.d_multi(&[k - b, b]).unwrap().scale(p.pow(mc, b as u64));
            }
            d1.push(acc);
            d2.push(ring.d(1, k).unwrap());
        }
        DiffOpAutomorphism::new(ring.clone(), x, vec![d1, d2], vec![]).unwrap()
    }

    #[test]
    fn shear_matches_linear_constructor() {
        for p in [2, 3, 5] {
            let ring = DiffOpRing::plain(pc(p), 2);
            let a = DiffOpAutomorphism::from_linear(&ring, &[vec![1, 0], vec![1, 1]], 3).unwrap();
            assert_eq!(a, shear(&ring, 1, 3));
        }
    }

    #[test]
    fn shear_matches_conjugation() {
        let p = pc(3);
        let ring = DiffOpRing::plain(p, 2);
        let (x1, x2) = (MultiPoly::var(p, 2, 0), MultiPoly::var(p, 2, 1));
        let tau = PolyAutomorphism::new(vec![x1.clone(), &x2 + &x1]).unwrap();
        let induced = DiffOpAutomorphism::from_poly_automorphism(&ring, &tau, 2).unwrap();
        assert_eq!(induced, shear(&ring, 1, 2));
        assert_eq!(induced.apply(&ring.d(0, 1).unwrap()).unwrap(), &ring.d(0, 1).unwrap() - &ring.d(1, 1).unwrap());
    }

    #[test]
    fn composite_examples() {
        let ring = DiffOpRing::plain(pc(3), 1);
        let id = DiffOpAutomorphism::identity(&ring, 2).unwrap();
        assert_eq!(id.composite(0, 5).unwrap(), ring.d(0, 5).unwrap());
        assert_eq!(id.composite(0, 3).unwrap(), ring.d(0, 3).unwrap());
        assert_eq!(id.composite(0, 9), Err(Error::InsufficientLevels { level: 2 }));
    }

    #[test]
    fn relation_violations_named() {
        let ring = DiffOpRing::plain(pc(3), 1);
        let bad = DiffOpAutomorphism::new(
            ring.clone(),
            vec![ring.x(0).scale(2)],
            vec![vec![ring.d(0, 1).unwrap()]],
            vec![],
        );
        assert!(matches!(bad, Err(Error::RelationViolation(ref s)) if s.contains("D1[1]'")));
    }

    #[test]
    fn homomorphism_on_products() {
        let ring = DiffOpRing::plain(pc(2), 2);
        let s = shear(&ring, 1, 3);
        let a = &ring.d(0, 3).unwrap() * &ring.x(1);
        let b = &ring.pow(&ring.x(0), 2) + &ring.d(1, 2).unwrap();
        assert_eq!(s.apply(&(&a * &b)).unwrap(), &s.apply(&a).unwrap() * &s.apply(&b).unwrap());
    }

    #[test]
    fn truncated_translation() {
        // x -> x + 1 on T_(1): d is fixed and x^p stays central.
        let ring = DiffOpRing::new(pc(3), 1, 0, Some(vec![1])).unwrap();
        let aut = DiffOpAutomorphism::new(
            ring.clone(),
            vec![&ring.x(0) + &ring.one()],
            vec![vec![ring.d(0, 1).unwrap()]],
            vec![],
        )
        .unwrap();
        let c = aut.centre_restriction().unwrap().unwrap();
        assert_eq!(c.images()[0], &MultiPoly::var(pc(3), 1, 0) + &MultiPoly::one(pc(3), 1));
        // d -> d + 1 is not an endomorphism of T_(1): (d + 1)^p = 1.
        let bad = DiffOpAutomorphism::new(ring.clone(), vec![ring.x(0)], vec![vec![&ring.d(0, 1).unwrap() + &ring.one()]], vec![]);
        assert!(matches!(bad, Err(Error::RelationViolation(_))));
    }
}
