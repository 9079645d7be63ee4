//! Element grammar:
//!
//! ```text
//! element := ['-'] term (('+'|'-') term)*
//! term    := scalar | [scalar '*'] factor ('*' factor)*
//! factor  := ident ['^' nat]
//! ident   := ('x'|'y'|'q'|'p'|'e') nat | 'D' nat '[' nat ']'
//! ```
//!
//! Whitespace is ignored everywhere. Factors multiply in the order written,
//! so noncommutative inputs come out normal-ordered.

use crate::csa::StructureConstantAlgebra;
use crate::diffop::{DiffOpElement, DiffOpRing};
use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::powerseries::TruncatedSeries;
use crate::primefield::PrimeChar;
use crate::weyl::{WeylElement, WeylRing};

use super::session::{Element, Session};

/// A generator symbol with zero-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ident {
    X(usize),
    Y(usize),
    Q(usize),
    P(usize),
    E(usize),
    /// `D<i>[<k>]`.
    D(usize, u64),
}

impl Ident {
    pub fn name(&self) -> String {
        match *self {
            Ident::X(i) => format!("x{}", i + 1),
            Ident::Y(i) => format!("y{}", i + 1),
            Ident::Q(i) => format!("q{}", i + 1),
            Ident::P(i) => format!("p{}", i + 1),
            Ident::E(i) => format!("e{}", i + 1),
            Ident::D(i, k) => format!("D{}[{}]", i + 1, k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub ident: Ident,
    pub exp: u64,
    pub pos: usize,
}

/// `coeff * factors[0] * factors[1] * ...`, `coeff` already reduced mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: u64,
    pub factors: Vec<Factor>,
}

/// The parsed sum of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxTree {
    pub terms: Vec<Term>,
}

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    end: usize,
    p: PrimeChar,
}

impl Parser {
    fn new(text: &str, p: PrimeChar) -> Self {
        let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Parser { chars, at: 0, end: text.len(), p }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.end, |&(i, _)| i)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos(), msg))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(got) => self.err(format!("expected '{}', found '{}'", c, got)),
                None => self.err(format!("expected '{}' at end of input", c)),
            }
        }
    }

    fn digits(&mut self) -> Result<String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.at += 1;
        }
        if s.is_empty() {
            return self.err("expected a number");
        }
        Ok(s)
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.pos();
        let s = self.digits()?;
        s.parse().map_err(|_| Error::parse(start, format!("number {} is too large", s)))
    }

    fn scalar(&mut self) -> Result<u64> {
        let p = self.p;
        let s = self.digits()?;
        Ok(s.bytes().fold(0, |acc, b| p.add(p.mul(acc, 10 % p.get()), (b - b'0') as u64 % p.get())))
    }

    fn index(&mut self) -> Result<usize> {
        let start = self.pos();
        let i = self.nat()?;
        if i == 0 {
            return Err(Error::parse(start, "generator indices start at 1"));
        }
        usize::try_from(i - 1).map_err(|_| Error::parse(start, "index too large"))
    }

    fn factor(&mut self) -> Result<Factor> {
        let pos = self.pos();
        let ident = match self.peek() {
            Some(c @ ('x' | 'y' | 'q' | 'p' | 'e')) => {
                self.at += 1;
                let i = self.index()?;
                match c {
                    'x' => Ident::X(i),
                    'y' => Ident::Y(i),
                    'q' => Ident::Q(i),
                    'p' => Ident::P(i),
                    _ => Ident::E(i),
                }
            }
            Some('D') => {
                self.at += 1;
                let i = self.index()?;
                self.expect('[')?;
                let k = self.nat()?;
                self.expect(']')?;
                Ident::D(i, k)
            }
            Some(c) => return self.err(format!("unexpected '{}'", c)),
            None => return self.err("unexpected end of input"),
        };
        let exp = if self.eat('^') { self.nat()? } else { 1 };
        Ok(Factor { ident, exp, pos })
    }

    fn term(&mut self, negate: bool) -> Result<Term> {
        let mut coeff = 1;
        let mut factors = Vec::new();
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            coeff = self.scalar()?;
            if !self.eat('*') {
                return Ok(Term { coeff: if negate { self.p.neg(coeff) } else { coeff }, factors });
            }
        }
        factors.push(self.factor()?);
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(Term { coeff: if negate { self.p.neg(coeff) } else { coeff }, factors })
    }

    fn element(&mut self) -> Result<SyntaxTree> {
        let mut terms = vec![];
        let mut negate = self.eat('-');
        loop {
            terms.push(self.term(negate)?);
            match self.peek() {
                None => break,
                Some('+') => negate = false,
                Some('-') => negate = true,
                Some(c) => return self.err(format!("unexpected '{}'", c)),
            }
            self.at += 1;
        }
        Ok(SyntaxTree { terms })
    }
}

/// Parses without interpreting generators; scalars are reduced mod `p`.
pub fn parse_syntax(text: &str, p: PrimeChar) -> Result<SyntaxTree> {
    Parser::new(text, p).element()
}

/// Interpretation of the syntax tree in one algebra.
pub(crate) trait TextAlgebra {
    type E: Clone;
    fn atom(&self, id: Ident) -> std::result::Result<Self::E, String>;
    fn constant(&self, c: u64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> std::result::Result<Self::E, String>;
}

fn out_of_range(id: Ident, n: usize) -> String {
    format!("{} is out of range (only {} available)", id.name(), n)
}

fn pow<T: TextAlgebra>(alg: &T, base: &T::E, mut e: u64) -> std::result::Result<T::E, String> {
    let mut acc = alg.constant(1);
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = alg.mul(&acc, &b)?;
        }
        e >>= 1;
        if e > 0 {
            b = alg.mul(&b, &b)?;
        }
    }
    Ok(acc)
}

pub(crate) fn evaluate<T: TextAlgebra>(alg: &T, tree: &SyntaxTree) -> Result<T::E> {
    let mut acc = alg.constant(0);
    for t in &tree.terms {
        let mut prod = alg.constant(t.coeff);
        for f in &t.factors {
            let g = alg.atom(f.ident).map_err(|m| Error::parse(f.pos, m))?;
            let g = pow(alg, &g, f.exp).map_err(|m| Error::parse(f.pos, m))?;
            prod = alg.mul(&prod, &g).map_err(|m| Error::parse(f.pos, m))?;
        }
        acc = alg.add(&acc, &prod);
    }
    Ok(acc)
}

/// Commutative polynomials in `x`, optionally truncated at total degree `bound`.
pub(crate) struct PolyText {
    pub p: PrimeChar,
    pub n: usize,
    pub bound: Option<u64>,
}

impl TextAlgebra for PolyText {
    type E = MultiPoly;

    fn atom(&self, id: Ident) -> std::result::Result<MultiPoly, String> {
        match id {
            Ident::X(i) if i < self.n => Ok(MultiPoly::var(self.p, self.n, i)),
            Ident::X(_) => Err(out_of_range(id, self.n)),
            _ => Err(format!("{} is not a generator here (only x1..x{})", id.name(), self.n)),
        }
    }

    fn constant(&self, c: u64) -> MultiPoly {
        MultiPoly::constant(self.p, self.n, c)
    }

    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a + b
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> std::result::Result<MultiPoly, String> {
        Ok(match self.bound {
            Some(d) => a.mul_truncated(b, d),
            None => a * b,
        })
    }
}

impl TextAlgebra for DiffOpRing {
    type E = DiffOpElement;

    fn atom(&self, id: Ident) -> std::result::Result<DiffOpElement, String> {
        match id {
            Ident::X(i) if i < self.nx() => Ok(self.x(i)),
            Ident::X(_) => Err(out_of_range(id, self.nx())),
            Ident::Y(j) if j < self.ny() => Ok(self.y(j)),
            Ident::Y(_) => Err(out_of_range(id, self.ny())),
            Ident::D(i, _) if i >= self.nx() => Err(out_of_range(id, self.nx())),
            Ident::D(i, k) => {
                let k = u32::try_from(k).map_err(|_| format!("divided power {} is too large", id.name()))?;
                self.d(i, k).map_err(|e| e.to_string())
            }
            _ => Err(format!("{} is not a generator of a differential operator ring", id.name())),
        }
    }

    fn constant(&self, c: u64) -> DiffOpElement {
        self.scalar(c)
    }

    fn add(&self, a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
        a + b
    }

    fn mul(&self, a: &DiffOpElement, b: &DiffOpElement) -> std::result::Result<DiffOpElement, String> {
        Ok(DiffOpRing::mul(self, a, b))
    }
}

impl TextAlgebra for WeylRing {
    type E = WeylElement;

    fn atom(&self, id: Ident) -> std::result::Result<WeylElement, String> {
        match id {
            Ident::Q(i) if i < self.n() => Ok(self.q(i)),
            Ident::P(i) if i < self.n() => Ok(self.p(i)),
            Ident::Q(_) | Ident::P(_) => Err(out_of_range(id, self.n())),
            Ident::Y(j) if j < self.m() => Ok(self.y(j)),
            Ident::Y(_) => Err(out_of_range(id, self.m())),
            _ => Err(format!("{} is not a generator of a Weyl algebra", id.name())),
        }
    }

    fn constant(&self, c: u64) -> WeylElement {
        self.scalar(c)
    }

    fn add(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a + b
    }

    fn mul(&self, a: &WeylElement, b: &WeylElement) -> std::result::Result<WeylElement, String> {
        Ok(WeylRing::mul(self, a, b))
    }
}

/// Coordinate vectors over `e_1 = 1, ..., e_N`; with no structure table
/// only products by scalars are available.
pub(crate) struct CsaText<'a> {
    pub p: PrimeChar,
    pub dim: usize,
    pub table: Option<&'a StructureConstantAlgebra>,
}

impl TextAlgebra for CsaText<'_> {
    type E = Vec<u64>;

    fn atom(&self, id: Ident) -> std::result::Result<Vec<u64>, String> {
        match id {
            Ident::E(i) if i < self.dim => {
                let mut v = vec![0; self.dim];
                v[i] = 1;
                Ok(v)
            }
            Ident::E(_) => Err(out_of_range(id, self.dim)),
            _ => Err(format!("{} is not a basis element e1..e{}", id.name(), self.dim)),
        }
    }

    fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[0] = self.p.reduce(c);
        v
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.p.add(x, y)).collect()
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> std::result::Result<Vec<u64>, String> {
        if let Some(alg) = self.table {
            return Ok(alg.mul(a, b));
        }
        let scalar = |v: &Vec<u64>| v[1..].iter().all(|&c| c == 0);
        let scale = |c: u64, v: &Vec<u64>| v.iter().map(|&x| self.p.mul(c, x)).collect();
        if scalar(a) {
            Ok(scale(a[0], b))
        } else if scalar(b) {
            Ok(scale(b[0], a))
        } else {
            Err("products of basis elements need the structure table".into())
        }
    }
}

/// Parses `text` as an element of the session algebra.
pub fn parse_element(text: &str, session: &Session) -> Result<Element> {
    let p = session.prime();
    let tree = parse_syntax(text, p)?;
    Ok(match session {
        Session::Poly { n, .. } => Element::Poly(evaluate(&PolyText { p, n: *n, bound: None }, &tree)?),
        Session::Series { n, bound, .. } => {
            let f = evaluate(&PolyText { p, n: *n, bound: Some(*bound) }, &tree)?;
            Element::Series(TruncatedSeries::new(f, *bound))
        }
        Session::DiffOp { ring, .. } => Element::DiffOp(evaluate(ring, &tree)?),
        Session::Weyl(ring) => Element::Weyl(evaluate(ring, &tree)?),
        Session::Csa(alg) => Element::Csa(evaluate(&CsaText { p, dim: alg.dim(), table: Some(alg) }, &tree)?),
    })
}

/// A single generator name such as `x2` or `D1[3]`, as written on the left of `->`.
pub fn parse_generator(text: &str) -> Result<Ident> {
    let mut parser = Parser::new(text, PrimeChar::new(2).expect("2 is prime"));
    let f = parser.factor()?;
    if parser.peek().is_some() || f.exp != 1 {
        return parser.err("expected a single generator");
    }
    Ok(f.ident)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Kind, SessionConfig};
    use crate::monomial::Monomial;

    fn poly_from_exponents(p: PrimeChar, n: usize, terms: &[(Vec<u32>, u64)]) -> MultiPoly {
        MultiPoly::from_terms(p, n, terms.iter().map(|(e, c)| (Monomial::new(e.clone()), *c)))
    }

    fn session(kind: Kind, p: u64, n: usize, m: usize) -> Session {
        let mut cfg = SessionConfig::new(kind, p, n, m).unwrap();
        match kind {
            Kind::DiffOp | Kind::DiffOpPoly => cfg = cfg.with_kmax(2),
            Kind::Series => cfg = cfg.with_degree_bound(4),
            Kind::Tk => cfg = cfg.with_k(vec![1; n]),
            _ => {}
        }
        Session::from_config(&cfg).unwrap()
    }

    #[test]
    fn poly_example() {
        let s = session(Kind::Poly, 5, 2, 0);
        let Element::Poly(f) = parse_element("3*x1^2*x2 + 1", &s).unwrap() else { panic!() };
        let want = poly_from_exponents(PrimeChar::new(5).unwrap(), 2, &[(vec![2, 1], 3), (vec![0, 0], 1)]);
        assert_eq!(f, want);
    }

    #[test]
    fn normal_ordering_on_parse() {
        let s = session(Kind::DiffOp, 5, 1, 0);
        assert_eq!(parse_element("D1[3]*x1", &s).unwrap().render(), "D1[2] + x1*D1[3]");
        let w = session(Kind::Weyl, 5, 1, 0);
        assert_eq!(parse_element("p1*q1", &w).unwrap().render(), "1 + q1*p1");
    }

    #[test]
    fn signs_and_scalars_normalise() {
        let s = session(Kind::Poly, 7, 1, 0);
        assert_eq!(parse_element("-x1 - 2", &s).unwrap().render(), "5 + 6*x1");
        assert_eq!(parse_element("100000000000000000000000000001 * x1", &s).unwrap().render(), parse_element(&format!("{}*x1", (10u128.pow(29) + 1) % 7), &s).unwrap().render());
        assert_eq!(parse_element(" x 1 ^ 2 ", &s).unwrap().render(), "x1^2");
        assert_eq!(parse_element("0", &s).unwrap().render(), "0");
    }

    #[test]
    fn positions_in_errors() {
        let s = session(Kind::Poly, 3, 2, 0);
        assert_eq!(parse_element("x1 + x3", &s), Err(Error::parse(5, "x3 is out of range (only 2 available)")));
        assert!(matches!(parse_element("x1 + ", &s), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_element("x1 ** x2", &s), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_element("q1", &s), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_element("x0", &s), Err(Error::Parse { pos: 1, .. })));
        let t = session(Kind::Tk, 3, 1, 0);
        assert!(matches!(parse_element("D1[3]", &t), Err(Error::Parse { pos: 0, .. })));
        assert!(parse_element("D1[2]", &t).is_ok());
    }

    #[test]
    fn series_truncates_while_parsing() {
        let s = session(Kind::Series, 5, 1, 0);
        assert_eq!(parse_element("x1^3*x1^9 + x1^2", &s).unwrap().render(), "x1^2");
    }

    #[test]
    fn render_round_trip() {
        let cases = [
            (session(Kind::Poly, 3, 2, 0), "2*x1*x2^3 + x2 - 1"),
            (session(Kind::DiffOpPoly, 3, 2, 1), "D1[4]*x1^2*y1 + 2*D2[1]*x2"),
            (session(Kind::Weyl, 2, 1, 0), "p1^3*q1^2 + q1"),
            (session(Kind::WeylPoly, 3, 1, 1), "y1*p1*q1^4"),
            (session(Kind::Tk, 3, 2, 1), "D1[2]*x1^5 + D2[1]*x2*y1"),
        ];
        for (s, text) in cases {
            let e = parse_element(text, &s).unwrap();
            assert_eq!(parse_element(&e.render(), &s).unwrap(), e, "{}", text);
        }
    }

    #[test]
    fn generator_names() {
        assert_eq!(parse_generator("D2[9]").unwrap(), Ident::D(1, 9));
        assert_eq!(parse_generator(" x3 ").unwrap(), Ident::X(2));
        assert!(parse_generator("x1*x2").is_err());
        assert!(parse_generator("x1^2").is_err());
    }
}
