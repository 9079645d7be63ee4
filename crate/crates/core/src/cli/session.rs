//! The algebra a session works in, and elements of it.

use crate::csa::StructureConstantAlgebra;
use crate::diffop::{DiffOpElement, DiffOpRing};
use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::powerseries::TruncatedSeries;
use crate::primefield::PrimeChar;
use crate::weyl::{WeylElement, WeylRing};

use super::config::{Kind, SessionConfig};
use super::render::render_terms;

#[derive(Clone, Debug, PartialEq)]
pub enum Session {
    Poly { p: PrimeChar, n: usize },
    Series { p: PrimeChar, n: usize, bound: u64 },
    /// `levels` is the number of supplied prime-power divided-power images
    /// (`Kmax`; unused for `T_k`, whose ring carries `k`).
    DiffOp { ring: DiffOpRing, levels: usize },
    Weyl(WeylRing),
    Csa(StructureConstantAlgebra),
}

impl Session {
    /// The session algebra; `csa` without `matrix=` needs [`Session::csa`] instead.
    pub fn from_config(cfg: &SessionConfig) -> Result<Session> {
        cfg.validate()?;
        let (p, n, m) = (cfg.p, cfg.n, cfg.m);
        Ok(match cfg.kind {
            Kind::Poly => Session::Poly { p, n },
            Kind::Series => Session::Series { p, n, bound: cfg.degree_bound.expect("validated") },
            Kind::DiffOp | Kind::DiffOpPoly => {
                Session::DiffOp { ring: DiffOpRing::new(p, n, m, None)?, levels: cfg.kmax.expect("validated") }
            }
            Kind::Tk => {
                let k = cfg.k.clone().expect("validated");
                let levels = *k.iter().max().expect("n > 0") as usize;
                Session::DiffOp { ring: DiffOpRing::new(p, n, m, Some(k))?, levels }
            }
            Kind::Weyl | Kind::WeylPoly => Session::Weyl(WeylRing::new(p, n, m)),
            Kind::Csa => match cfg.matrix {
                Some(r) => Session::Csa(StructureConstantAlgebra::matrix_algebra(p, r)),
                None => return Err(Error::InvalidConfig("csa without matrix= needs a structure table".into())),
            },
        })
    }

    pub fn csa(cfg: &SessionConfig, alg: StructureConstantAlgebra) -> Result<Session> {
        if cfg.kind != Kind::Csa || alg.dim() != cfg.n || alg.prime() != cfg.p {
            return Err(Error::InvalidConfig("structure table does not match the header".into()));
        }
        Ok(Session::Csa(alg))
    }

    pub fn prime(&self) -> PrimeChar {
        match self {
            Session::Poly { p, .. } | Session::Series { p, .. } => *p,
            Session::DiffOp { ring, .. } => ring.prime(),
            Session::Weyl(r) => r.prime(),
            Session::Csa(a) => a.prime(),
        }
    }

    pub fn render(&self, e: &Element) -> String {
        e.render()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Poly(MultiPoly),
    Series(TruncatedSeries),
    DiffOp(DiffOpElement),
    Weyl(WeylElement),
    Csa(Vec<u64>),
}

pub(crate) fn x_name(i: usize) -> String {
    format!("x{}", i + 1)
}

impl Element {
    /// Canonical text: graded-lex order, coefficients in `[0, p)`.
    pub fn render(&self) -> String {
        match self {
            Element::Poly(f) => f.render_with(&x_name),
            Element::Series(s) => s.poly().render_with(&x_name),
            Element::DiffOp(a) => a.to_string(),
            Element::Weyl(a) => a.to_string(),
            Element::Csa(v) => render_terms(
                v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (c, vec![format!("e{}", i + 1)])),
            ),
        }
    }
}
