//! Exponent vectors and the sparse term maps every algebra here is built on.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::primefield::PrimeChar;

/// An exponent vector, ordered graded-lexicographically.
///
/// Lower total degree sorts first; within a degree, the vector that is
/// lexicographically larger sorts first, so `x1` precedes `x2` and
/// `x1^2` precedes `x1*x2`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn zero(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    /// The unit vector `e_i` scaled by `k`.
    pub fn unit(len: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; len];
        v[i] = k;
        Monomial(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exps_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn into_exps(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some component would go negative.
    pub fn checked_sub(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Monomial {
        Monomial(self.0[range].to_vec())
    }

    pub fn concat(parts: &[&[u32]]) -> Monomial {
        Monomial(parts.iter().flat_map(|p| p.iter().copied()).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for Monomial {
    fn from(v: Vec<u32>) -> Self {
        Monomial(v)
    }
}

impl From<&[u32]> for Monomial {
    fn from(v: &[u32]) -> Self {
        Monomial(v.to_vec())
    }
}

/// Canonical sparse coefficient map: no zero values are ever stored.
pub type Terms = BTreeMap<Monomial, u64>;

/// Adds `c` into the entry at `m`, dropping it if it cancels.
pub fn add_term(terms: &mut Terms, p: PrimeChar, m: Monomial, c: u64) {
    if c == 0 {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let v = p.add(*e.get(), c);
            if v == 0 {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

pub fn add_terms(a: &Terms, b: &Terms, p: PrimeChar) -> Terms {
    let mut out = a.clone();
    for (m, &c) in b {
        add_term(&mut out, p, m.clone(), c);
    }
    out
}

pub fn sub_terms(a: &Terms, b: &Terms, p: PrimeChar) -> Terms {
    let mut out = a.clone();
    for (m, &c) in b {
        add_term(&mut out, p, m.clone(), p.neg(c));
    }
    out
}

pub fn scale_terms(a: &Terms, c: u64, p: PrimeChar) -> Terms {
    if c.is_multiple_of(p.get()) {
        return Terms::new();
    }
    a.iter().map(|(m, &v)| (m.clone(), p.mul(v, c))).collect()
}

/// All vectors of length `n` with entries in `[0, bound)`, in lexicographic order.
pub fn box_vectors(n: usize, bound: u32) -> Vec<Vec<u32>> {
    box_vectors_ragged(&vec![bound; n])
}

/// All vectors with `v[i] < bounds[i]`.
pub fn box_vectors_ragged(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..b).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// All vectors of length `n` with total degree exactly `d`.
pub fn vectors_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in vectors_of_degree(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
