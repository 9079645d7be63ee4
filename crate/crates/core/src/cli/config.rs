//! Session parameters and the automorphism-file header line
//! `kind p n m [k=a,b] [D=..] [Kmax=..] [matrix=r]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primefield::PrimeChar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Poly,
    Series,
    DiffOp,
    DiffOpPoly,
    Weyl,
    WeylPoly,
    Tk,
    Csa,
}

impl Kind {
    pub const ALL: [Kind; 8] =
        [Kind::Poly, Kind::Series, Kind::DiffOp, Kind::DiffOpPoly, Kind::Weyl, Kind::WeylPoly, Kind::Tk, Kind::Csa];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Poly => "poly",
            Kind::Series => "series",
            Kind::DiffOp => "diffop",
            Kind::DiffOpPoly => "diffop_poly",
            Kind::Weyl => "weyl",
            Kind::WeylPoly => "weyl_poly",
            Kind::Tk => "tk",
            Kind::Csa => "csa",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algebra kind '{}'", s)))
    }
}

/// Parameters of one session. `n` counts `x`/`q` variables (basis size for
/// `csa`), `m` counts central `y` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub kind: Kind,
    pub p: PrimeChar,
    pub n: usize,
    pub m: usize,
    pub k: Option<Vec<u32>>,
    pub degree_bound: Option<u64>,
    pub kmax: Option<usize>,
    pub matrix: Option<usize>,
}

impl SessionConfig {
    pub fn new(kind: Kind, p: u64, n: usize, m: usize) -> Result<Self> {
        Ok(SessionConfig { kind, p: PrimeChar::new(p)?, n, m, k: None, degree_bound: None, kmax: None, matrix: None })
    }

    pub fn with_k(mut self, k: Vec<u32>) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_degree_bound(mut self, d: u64) -> Self {
        self.degree_bound = Some(d);
        self
    }

    pub fn with_kmax(mut self, kmax: usize) -> Self {
        self.kmax = Some(kmax);
        self
    }

    pub fn with_matrix(mut self, r: usize) -> Self {
        self.matrix = Some(r);
        self
    }

    /// Checks that exactly the parameters meaningful for the kind are present.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let kind = self.kind;
        if self.k.is_some() != (kind == Kind::Tk) {
            return bad(format!("k= is required for tk and only for tk (kind {})", kind));
        }
        if self.degree_bound.is_some() != (kind == Kind::Series) {
            return bad(format!("D= is required for series and only for series (kind {})", kind));
        }
        if self.kmax.is_some() != matches!(kind, Kind::DiffOp | Kind::DiffOpPoly) {
            return bad(format!("Kmax= is required for diffop kinds and only for them (kind {})", kind));
        }
        if self.matrix.is_some() && kind != Kind::Csa {
            return bad("matrix= only applies to csa".into());
        }
        if matches!(kind, Kind::Poly | Kind::Series | Kind::DiffOp | Kind::Weyl | Kind::Csa) && self.m != 0 {
            return bad(format!("kind {} has no central y variables; m must be 0", kind));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if let Some(k) = &self.k {
            if k.len() != self.n {
                return bad(format!("k has {} entries but n = {}", k.len(), self.n));
            }
            if k.contains(&0) {
                return bad("every k_i must be positive".into());
            }
        }
        if self.kmax == Some(0) {
            return bad("Kmax must be positive".into());
        }
        if let Some(r) = self.matrix {
            if r == 0 || r * r != self.n {
                return bad(format!("matrix={} needs n = {}", r, r * r));
            }
        }
        Ok(())
    }

    /// Parses a header line.
    pub fn parse_header(line: &str) -> Result<Self> {
        let mut words = line.split_whitespace();
        let mut next = |what: &str| words.next().ok_or_else(|| Error::parse(0, format!("header is missing {}", what)));
        let kind: Kind = next("the algebra kind")?.parse().map_err(|e: Error| Error::parse(0, e.to_string()))?;
        let num = |w: &str, what: &str| w.parse::<u64>().map_err(|_| Error::parse(0, format!("bad {} '{}'", what, w)));
        let p = num(next("p")?, "prime")?;
        let n = num(next("n")?, "n")? as usize;
        let m = num(next("m")?, "m")? as usize;
        let mut cfg = SessionConfig::new(kind, p, n, m)?;
        for w in words {
            let (key, val) = w.split_once('=').ok_or_else(|| Error::parse(0, format!("expected key=value, got '{}'", w)))?;
            let dup = || Error::parse(0, format!("repeated header field {}", key));
            match key {
                "k" => {
                    let k = val.split(',').map(|v| num(v, "k entry").map(|v| v as u32)).collect::<Result<Vec<_>>>()?;
                    if cfg.k.replace(k).is_some() {
                        return Err(dup());
                    }
                }
                "D" => {
                    if cfg.degree_bound.replace(num(val, "D")?).is_some() {
                        return Err(dup());
                    }
                }
                "Kmax" => {
                    if cfg.kmax.replace(num(val, "Kmax")? as usize).is_some() {
                        return Err(dup());
                    }
                }
                "matrix" => {
                    if cfg.matrix.replace(num(val, "matrix")? as usize).is_some() {
                        return Err(dup());
                    }
                }
                _ => return Err(Error::parse(0, format!("unknown header field '{}'", key))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SessionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.kind, self.p, self.n, self.m)?;
        if let Some(k) = &self.k {
            let k: Vec<String> = k.iter().map(u32::to_string).collect();
            write!(f, " k={}", k.join(","))?;
        }
        if let Some(d) = self.degree_bound {
            write!(f, " D={}", d)?;
        }
        if let Some(km) = self.kmax {
            write!(f, " Kmax={}", km)?;
        }
        if let Some(r) = self.matrix {
            write!(f, " matrix={}", r)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        for line in ["poly 3 2 0", "tk 2 2 1 k=2,1", "series 5 1 0 D=8", "diffop_poly 3 1 1 Kmax=2", "csa 5 4 0 matrix=2"] {
            let cfg = SessionConfig::parse_header(line).unwrap();
            assert_eq!(cfg.to_string(), line);
        }
    }

    #[test]
    fn inconsistent_headers() {
        assert!(matches!(SessionConfig::parse_header("poly 3 2 0 D=4"), Err(Error::InvalidConfig(_))));
        assert!(matches!(SessionConfig::parse_header("tk 3 2 0 k=1"), Err(Error::InvalidConfig(_))));
        assert!(matches!(SessionConfig::parse_header("weyl 3 1 1"), Err(Error::InvalidConfig(_))));
        assert!(matches!(SessionConfig::parse_header("poly 4 2 0"), Err(Error::NotPrime(4))));
        assert!(matches!(SessionConfig::parse_header("poly 3"), Err(Error::Parse { .. })));
        assert!(matches!(SessionConfig::parse_header("diffop 3 1 0"), Err(Error::InvalidConfig(_))));
    }
}
