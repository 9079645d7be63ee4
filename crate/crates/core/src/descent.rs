//! Iterative descents, nil decompositions and the projections `phi`/`psi`
//! for an arbitrary algebra equipped with commuting locally nilpotent
//! derivations.
//!
//! Everything here is written once against the [`Algebra`] trait and then
//! instantiated by the concrete algebras: polynomial rings, rings of
//! differential operators (and their truncations), and Weyl algebras.
//!
//! For a derivation `d` with iterative descent `x^[0] = 1, x^[1], ...`
//! (meaning `d(x^[i]) = x^[i-1]` and `x^[i] x^[j] = C(i+j, i) x^[i+j]`):
//!
//! ```text
//! phi(a) = sum_i (-1)^i x^[i] d^i(a)        psi(a) = sum_i (-1)^i d^i(a) x^[i]
//! a      = sum_i x^[i] phi(d^i(a))           a      = sum_i psi(d^i(a)) x^[i]
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::primefield::PrimeChar;

/// Default cap on the number of summands in a single projection.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// The operations the generic machinery needs from an algebra.
pub trait Algebra {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn prime(&self) -> PrimeChar;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplication by a residue in `[0, p)`.
    fn scale(&self, c: u64, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }
}

pub trait Derivation<A: Algebra> {
    fn apply(&self, alg: &A, a: &A::Elem) -> A::Elem;

    fn name(&self) -> String {
        "d".into()
    }
}

/// `ad r` or `-ad r`.
pub struct InnerDerivation<A: Algebra> {
    pub element: A::Elem,
    pub negate: bool,
    pub label: String,
}

impl<A: Algebra> InnerDerivation<A> {
    pub fn ad(element: A::Elem, label: impl Into<String>) -> Self {
        InnerDerivation { element, negate: false, label: label.into() }
    }

    pub fn neg_ad(element: A::Elem, label: impl Into<String>) -> Self {
        InnerDerivation { element, negate: true, label: label.into() }
    }
}

impl<A: Algebra> Derivation<A> for InnerDerivation<A> {
    fn apply(&self, alg: &A, a: &A::Elem) -> A::Elem {
        if self.negate {
            alg.commutator(a, &self.element)
        } else {
            alg.commutator(&self.element, a)
        }
    }

    fn name(&self) -> String {
        if self.negate {
            format!("-ad {}", self.label)
        } else {
            format!("ad {}", self.label)
        }
    }
}

/// A derivation given by a closure.
pub struct FnDerivation<'a, A: Algebra> {
    f: Box<dyn Fn(&A::Elem) -> A::Elem + 'a>,
    label: String,
}

impl<'a, A: Algebra> FnDerivation<'a, A> {
    pub fn new(label: impl Into<String>, f: impl Fn(&A::Elem) -> A::Elem + 'a) -> Self {
        FnDerivation { f: Box::new(f), label: label.into() }
    }
}

impl<A: Algebra> Derivation<A> for FnDerivation<'_, A> {
    fn apply(&self, _alg: &A, a: &A::Elem) -> A::Elem {
        (self.f)(a)
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// A derivation together with an iterative descent `x^[0] = 1, x^[1], ...`
/// of length `length` (`None` for an unbounded descent).
pub struct Descent<'a, A: Algebra> {
    derivation: Box<dyn Derivation<A> + 'a>,
    term: Box<dyn Fn(usize) -> Result<A::Elem> + 'a>,
    length: Option<usize>,
}

impl<'a, A: Algebra> Descent<'a, A> {
    pub fn new(
        derivation: impl Derivation<A> + 'a,
        length: Option<usize>,
        term: impl Fn(usize) -> Result<A::Elem> + 'a,
    ) -> Self {
        Descent { derivation: Box::new(derivation), term: Box::new(term), length }
    }

    /// A finite descent given by its stored elements.
    pub fn finite(derivation: impl Derivation<A> + 'a, elements: Vec<A::Elem>) -> Self
    where
        A::Elem: 'a,
    {
        let length = elements.len();
        Descent::new(derivation, Some(length), move |j| {
            elements
                .get(j)
                .cloned()
                .ok_or_else(|| Error::InvalidDescent(format!("index {j} beyond length {length}")))
        })
    }

    pub fn length(&self) -> Option<usize> {
        self.length
    }

    /// The descent element `x^[j]`.
    pub fn term(&self, j: usize) -> Result<A::Elem> {
        (self.term)(j)
    }

    pub fn derive(&self, alg: &A, a: &A::Elem) -> A::Elem {
        self.derivation.apply(alg, a)
    }

    pub fn derivation_name(&self) -> String {
        self.derivation.name()
    }

    fn in_range(&self, j: usize) -> bool {
        self.length.is_none_or(|l| j < l)
    }
}

/// Outcome of [`validate_descent`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDescent(self.failures.join("; ")))
        }
    }
}

/// Checks the iterativity and descent identities on every index pair below
/// `check_upto` (capped by the length), plus, for a finite length `l`,
/// `d^l = 0` on `samples` and `d^(l-1)(x^[l-1]) = 1`.
pub fn validate_descent<A: Algebra>(
    alg: &A,
    d: &Descent<'_, A>,
    check_upto: usize,
    samples: &[A::Elem],
) -> Result<ValidationReport> {
    let upto = d.length.map_or(check_upto, |l| l.min(check_upto));
    let mut report = ValidationReport::default();
    let terms = (0..upto).map(|j| d.term(j)).collect::<Result<Vec<_>>>()?;
    let p = alg.prime();

    if terms.first().is_some_and(|t0| *t0 != alg.one()) {
        report.failures.push("x^[0] != 1".into());
    }
    for (i, t) in terms.iter().enumerate() {
        let expected = if i == 0 { alg.zero() } else { terms[i - 1].clone() };
        if d.derive(alg, t) != expected {
            report.failures.push(format!("descent fails at index {i}"));
        }
    }
    for i in 0..upto {
        for j in 0..upto - i {
            let lhs = alg.mul(&terms[i], &terms[j]);
            let rhs = alg.scale(p.binom((i + j) as u64, i as u64), &terms[i + j]);
            if lhs != rhs {
                report.failures.push(format!("iterativity fails at ({i}, {j})"));
            }
        }
    }
    if let Some(l) = d.length {
        if l == upto && l >= 1 {
            let mut top = terms[l - 1].clone();
            for _ in 0..l - 1 {
                top = d.derive(alg, &top);
            }
            if top != alg.one() {
                report.failures.push(format!("d^{}(x^[{}]) != 1", l - 1, l - 1));
            }
        }
        for (k, s) in samples.iter().enumerate() {
            let mut cur = s.clone();
            for _ in 0..l {
                cur = d.derive(alg, &cur);
            }
            if !alg.is_zero(&cur) {
                report.failures.push(format!("d^{l} does not vanish on sample {k}"));
            }
        }
    }
    Ok(report)
}

/// Probabilistic Leibniz-rule check on all ordered pairs of `samples`.
pub fn check_leibniz<A: Algebra>(alg: &A, d: &dyn Derivation<A>, samples: &[A::Elem]) -> Result<()> {
    for (i, a) in samples.iter().enumerate() {
        for (j, b) in samples.iter().enumerate() {
            let lhs = d.apply(alg, &alg.mul(a, b));
            let rhs = alg.add(&alg.mul(&d.apply(alg, a), b), &alg.mul(a, &d.apply(alg, b)));
            if lhs != rhs {
                return Err(Error::InvalidDescent(format!(
                    "{} violates the Leibniz rule on samples ({i}, {j})",
                    d.name()
                )));
            }
        }
    }
    Ok(())
}

/// Checks the compatibility hypothesis of the multi-derivation theory: each
/// stored descent element of one derivation is killed by all the others.
pub fn check_compatible<A: Algebra>(alg: &A, descents: &[Descent<'_, A>], upto: usize) -> Result<()> {
    for (i, di) in descents.iter().enumerate() {
        let top = di.length.map_or(upto, |l| l.min(upto));
        for j in 0..top {
            let t = di.term(j)?;
            for (k, dk) in descents.iter().enumerate() {
                if k != i && !alg.is_zero(&dk.derive(alg, &t)) {
                    return Err(Error::InvalidDescent(format!(
                        "descent element {j} of derivation {i} is not killed by derivation {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn project_single<A: Algebra>(
    alg: &A,
    d: &Descent<'_, A>,
    a: &A::Elem,
    right: bool,
    max_terms: usize,
) -> Result<A::Elem> {
    let p = alg.prime();
    let mut acc = alg.zero();
    let mut cur = a.clone();
    let mut i = 0usize;
    while !alg.is_zero(&cur) && d.in_range(i) {
        if i >= max_terms {
            return Err(Error::NotLocallyNilpotent);
        }
        let x = d.term(i)?;
        let term = if right { alg.mul(&cur, &x) } else { alg.mul(&x, &cur) };
        acc = alg.add(&acc, &alg.scale(p.sign(i as u64), &term));
        cur = d.derive(alg, &cur);
        i += 1;
    }
    Ok(acc)
}

/// `phi = sum_i (-1)^i x^[i] d^i` for one descent.
pub fn phi_single<A: Algebra>(alg: &A, d: &Descent<'_, A>, a: &A::Elem) -> Result<A::Elem> {
    project_single(alg, d, a, false, DEFAULT_MAX_TERMS)
}

/// `psi = sum_i (-1)^i d^i(.) x^[i]` for one descent.
pub fn psi_single<A: Algebra>(alg: &A, d: &Descent<'_, A>, a: &A::Elem) -> Result<A::Elem> {
    project_single(alg, d, a, true, DEFAULT_MAX_TERMS)
}

/// Ordered product of the single projections; `descents[0]` acts first.
pub fn phi_projection<A: Algebra>(alg: &A, descents: &[Descent<'_, A>], a: &A::Elem) -> Result<A::Elem> {
    descents.iter().try_fold(a.clone(), |acc, d| phi_single(alg, d, &acc))
}

/// Mirror ordered product; the last descent acts first.
pub fn psi_projection<A: Algebra>(alg: &A, descents: &[Descent<'_, A>], a: &A::Elem) -> Result<A::Elem> {
    descents.iter().rev().try_fold(a.clone(), |acc, d| psi_single(alg, d, &acc))
}

/// Coordinates of an element over the joint invariant algebra, indexed by
/// descent multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct NilDecomposition<E> {
    pub components: BTreeMap<Vec<usize>, E>,
}

/// Visits `(alpha, d^alpha(a))` for every multi-index with `d^alpha(a) != 0`.
fn for_each_nonzero_derivative<A: Algebra>(
    alg: &A,
    descents: &[Descent<'_, A>],
    a: &A::Elem,
    f: &mut dyn FnMut(&[usize], &A::Elem) -> Result<()>,
) -> Result<()> {
    fn rec<A: Algebra>(
        alg: &A,
        descents: &[Descent<'_, A>],
        k: usize,
        prefix: &mut Vec<usize>,
        b: &A::Elem,
        f: &mut dyn FnMut(&[usize], &A::Elem) -> Result<()>,
    ) -> Result<()> {
        if k == descents.len() {
            return f(prefix, b);
        }
        let mut cur = b.clone();
        let mut j = 0;
        while !alg.is_zero(&cur) && descents[k].in_range(j) {
            if j >= DEFAULT_MAX_TERMS {
                return Err(Error::NotLocallyNilpotent);
            }
            prefix.push(j);
            rec(alg, descents, k + 1, prefix, &cur, f)?;
            prefix.pop();
            cur = descents[k].derive(alg, &cur);
            j += 1;
        }
        Ok(())
    }
    rec(alg, descents, 0, &mut Vec::new(), a, f)
}

/// `component(alpha) = phi(d^alpha(a))`; zero components are omitted.
pub fn descent_decompose<A: Algebra>(
    alg: &A,
    descents: &[Descent<'_, A>],
    a: &A::Elem,
) -> Result<NilDecomposition<A::Elem>> {
    let mut components = BTreeMap::new();
    for_each_nonzero_derivative(alg, descents, a, &mut |alpha, b| {
        let c = phi_projection(alg, descents, b)?;
        if !alg.is_zero(&c) {
            components.insert(alpha.to_vec(), c);
        }
        Ok(())
    })?;
    Ok(NilDecomposition { components })
}

/// Mirror of [`descent_decompose`]: `component(alpha) = psi(d^alpha(a))`,
/// so that `a = sum_alpha component(alpha) * x^[alpha]`.
pub fn descent_decompose_psi<A: Algebra>(
    alg: &A,
    descents: &[Descent<'_, A>],
    a: &A::Elem,
) -> Result<NilDecomposition<A::Elem>> {
    let mut components = BTreeMap::new();
    for_each_nonzero_derivative(alg, descents, a, &mut |alpha, b| {
        let c = psi_projection(alg, descents, b)?;
        if !alg.is_zero(&c) {
            components.insert(alpha.to_vec(), c);
        }
        Ok(())
    })?;
    Ok(NilDecomposition { components })
}

/// The ordered product `x_1^[alpha_1] ... x_k^[alpha_k]`.
pub fn descent_monomial<A: Algebra>(alg: &A, descents: &[Descent<'_, A>], alpha: &[usize]) -> Result<A::Elem> {
    let mut acc = alg.one();
    for (d, &j) in descents.iter().zip(alpha) {
        if j > 0 {
            acc = alg.mul(&acc, &d.term(j)?);
        }
    }
    Ok(acc)
}

/// `sum_alpha x^[alpha] * component(alpha)`.
pub fn reassemble<A: Algebra>(
    alg: &A,
    descents: &[Descent<'_, A>],
    dec: &NilDecomposition<A::Elem>,
) -> Result<A::Elem> {
    let mut acc = alg.zero();
    for (alpha, c) in &dec.components {
        acc = alg.add(&acc, &alg.mul(&descent_monomial(alg, descents, alpha)?, c));
    }
    Ok(acc)
}

/// The inverse of an automorphism that preserves the joint invariants,
/// assembled from the standard descents, their images under the
/// automorphism (with the twisted derivations), and the inverse on the
/// invariant subalgebra:
///
/// `sigma^{-1}(a) = sum_alpha x^[alpha] sigma_inv_inv(phi_sigma(d'^alpha(a)))`.
pub struct GenericInverse<'a, A: Algebra> {
    standard: Vec<Descent<'a, A>>,
    twisted: Vec<Descent<'a, A>>,
    on_invariants: Box<dyn Fn(&A::Elem) -> Result<A::Elem> + 'a>,
}

pub fn generic_invert<'a, A: Algebra>(
    standard: Vec<Descent<'a, A>>,
    twisted: Vec<Descent<'a, A>>,
    on_invariants: impl Fn(&A::Elem) -> Result<A::Elem> + 'a,
) -> Result<GenericInverse<'a, A>> {
    if standard.len() != twisted.len() {
        return Err(Error::InvalidDescent(format!(
            "{} standard descents but {} twisted ones",
            standard.len(),
            twisted.len()
        )));
    }
    Ok(GenericInverse { standard, twisted, on_invariants: Box::new(on_invariants) })
}

impl<A: Algebra> GenericInverse<'_, A> {
    pub fn apply(&self, alg: &A, a: &A::Elem) -> Result<A::Elem> {
        let mut acc = alg.zero();
        for_each_nonzero_derivative(alg, &self.twisted, a, &mut |alpha, b| {
            let c = phi_projection(alg, &self.twisted, b)?;
            if !alg.is_zero(&c) {
                let c = (self.on_invariants)(&c)?;
                let x = descent_monomial(alg, &self.standard, alpha)?;
                acc = alg.add(&acc, &alg.mul(&x, &c));
            }
            Ok(())
        })?;
        Ok(acc)
    }
}
