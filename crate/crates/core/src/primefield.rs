//! Exact arithmetic in the prime field F_p.
//!
//! [`PrimeChar`] is the characteristic and doubles as the arithmetic
//! context: sparse containers store bare residues (`u64` in `[0, p)`) and
//! route all arithmetic through it. [`FpScalar`] is the self-describing
//! scalar used at API boundaries, where mixing characteristics must be
//! reported rather than silently reduced.
//!
//! Binomial coefficients are evaluated digitwise (Lucas), so they are exact
//! for arbitrarily large arguments.

use std::fmt;

use crate::error::{Error, Result};

/// Largest accepted prime; keeps residue products inside `u64`.
pub const MAX_PRIME: u64 = (1 << 32) - 1;

/// The characteristic `p` of the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeChar(u64);

impl PrimeChar {
    /// Validates primality by trial division.
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeChar(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u64 {
        v % self.0
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn from_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::DivisionByZero(self.0));
        }
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(self.from_i64(t0))
    }

    /// `(-1)^k` as a residue.
    #[inline]
    pub fn sign(self, k: u64) -> u64 {
        if k.is_multiple_of(2) {
            1 % self.0
        } else {
            self.neg(1)
        }
    }

    /// `j! mod p` (zero once `j >= p`).
    pub fn factorial(self, j: u64) -> u64 {
        if j >= self.0 {
            return 0;
        }
        (1..=j).fold(1 % self.0, |acc, k| self.mul(acc, k))
    }

    /// Inverse of `j!` for `j < p`.
    pub fn factorial_inv(self, j: u64) -> Result<u64> {
        if j >= self.0 {
            return Err(Error::FactorialOutOfRange { j, p: self.0 });
        }
        self.inv(self.factorial(j))
    }

    /// `C(b, a) mod p` via Lucas' theorem; zero when `a > b`.
    pub fn binom(self, b: u64, a: u64) -> u64 {
        if a > b {
            return 0;
        }
        let p = self.0;
        let (mut b, mut a) = (b, a);
        let mut acc = 1 % p;
        while a > 0 || b > 0 {
            let (bd, ad) = (b % p, a % p);
            if ad > bd {
                return 0;
            }
            acc = self.mul(acc, self.small_binom(bd, ad));
            b /= p;
            a /= p;
        }
        acc
    }

    /// Componentwise product of binomials for exponent vectors.
    pub fn binom_vec(self, b: &[u32], a: &[u32]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = 1 % self.0;
        for (&bi, &ai) in b.iter().zip(a) {
            if acc == 0 {
                break;
            }
            acc = self.mul(acc, self.binom(bi as u64, ai as u64));
        }
        acc
    }

    // C(b, a) for digits a <= b < p, where the factorials are invertible.
    fn small_binom(self, b: u64, a: u64) -> u64 {
        let num = self.factorial(b);
        let den = self.mul(self.factorial(a), self.factorial(b - a));
        self.mul(num, self.inv(den).expect("digit factorials are units"))
    }
}

impl fmt::Display for PrimeChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue together with its characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    char: PrimeChar,
}

/// The four field operations accepted by [`fp_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FpScalar {
    pub fn new(value: i64, char: PrimeChar) -> Self {
        FpScalar { value: char.from_i64(value), char }
    }

    pub(crate) fn from_residue(value: u64, char: PrimeChar) -> Self {
        debug_assert!(value < char.get());
        FpScalar { value, char }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn char(self) -> PrimeChar {
        self.char
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        Ok(FpScalar { value: self.char.inv(self.value)?, char: self.char })
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Exact field operation; rejects mixed characteristics and division by zero.
pub fn fp_arith(a: FpScalar, b: FpScalar, op: FieldOp) -> Result<FpScalar> {
    if a.char != b.char {
        return Err(Error::CharMismatch(a.char.get(), b.char.get()));
    }
    let c = a.char;
    let value = match op {
        FieldOp::Add => c.add(a.value, b.value),
        FieldOp::Sub => c.sub(a.value, b.value),
        FieldOp::Mul => c.mul(a.value, b.value),
        FieldOp::Div => c.mul(a.value, c.inv(b.value)?),
    };
    Ok(FpScalar { value, char: c })
}

/// `C(b, a) mod p` as a scalar.
pub fn binom_mod_p(b: u64, a: u64, char: PrimeChar) -> FpScalar {
    FpScalar::from_residue(char.binom(b, a), char)
}

/// Vector form: `prod_i C(b_i, a_i) mod p`.
pub fn binom_vec_mod_p(b: &[u32], a: &[u32], char: PrimeChar) -> FpScalar {
    FpScalar::from_residue(char.binom_vec(b, a), char)
}

/// `(j!)^{-1} mod p`, defined for `j < p`.
pub fn factorial_inv(j: u64, char: PrimeChar) -> Result<FpScalar> {
    Ok(FpScalar::from_residue(char.factorial_inv(j)?, char))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeChar::new(1), Err(Error::NotPrime(1)));
        assert_eq!(PrimeChar::new(9), Err(Error::NotPrime(9)));
        assert!(PrimeChar::new(2).is_ok());
        assert!(PrimeChar::new(7919).is_ok());
    }

    #[test]
    fn arith_examples() {
        let p5 = pc(5);
        let s = |v| FpScalar::new(v, p5);
        assert_eq!(fp_arith(s(3), s(4), FieldOp::Add).unwrap().value(), 2);
        assert_eq!(fp_arith(s(2), s(3), FieldOp::Div).unwrap().value(), 4);
        let p2 = pc(2);
        let one = FpScalar::new(1, p2);
        assert_eq!(fp_arith(one, one, FieldOp::Add).unwrap().value(), 0);
    }

    #[test]
    fn arith_errors() {
        let p5 = pc(5);
        let a = FpScalar::new(3, p5);
        assert_eq!(
            fp_arith(a, FpScalar::new(0, p5), FieldOp::Div),
            Err(Error::DivisionByZero(5))
        );
        assert_eq!(
            fp_arith(a, FpScalar::new(1, pc(3)), FieldOp::Add),
            Err(Error::CharMismatch(5, 3))
        );
    }

    #[test]
    fn binomial_examples() {
        for p in [2, 3, 5, 7, 11] {
            assert_eq!(binom_mod_p(p, 1, pc(p)).value(), 0);
            assert_eq!(binom_mod_p(1234, 0, pc(p)).value(), 1);
        }
        // 35 mod 2
        assert_eq!(binom_mod_p(7, 3, pc(2)).value(), 1);
        assert_eq!(binom_mod_p(3, 4, pc(5)).value(), 0);
        assert_eq!(binom_vec_mod_p(&[3, 2], &[2, 1], pc(5)).value(), 1);
    }

    #[test]
    fn factorial_inverse_examples() {
        assert_eq!(factorial_inv(0, pc(5)).unwrap().value(), 1);
        // 3! = 6 = 1 mod 5
        assert_eq!(factorial_inv(3, pc(5)).unwrap().value(), 1);
        // 4! = 24 = 3 mod 7 and 3 * 5 = 15 = 1 mod 7
        assert_eq!(factorial_inv(4, pc(7)).unwrap().value(), 5);
        assert_eq!(
            factorial_inv(5, pc(5)),
            Err(Error::FactorialOutOfRange { j: 5, p: 5 })
        );
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2u64, 3, 5] {
            let c = pc(p);
            for a in 0..p {
                for b in 0..p {
                    assert_eq!(c.add(a, b), c.add(b, a));
                    assert_eq!(c.mul(a, b), c.mul(b, a));
                    assert_eq!(c.add(c.sub(a, b), b), a);
                    for d in 0..p {
                        assert_eq!(c.mul(a, c.add(b, d)), c.add(c.mul(a, b), c.mul(a, d)));
                        assert_eq!(c.mul(c.mul(a, b), d), c.mul(a, c.mul(b, d)));
                    }
                }
                if a != 0 {
                    assert_eq!(c.mul(a, c.inv(a).unwrap()), 1);
                }
            }
        }
    }
}
