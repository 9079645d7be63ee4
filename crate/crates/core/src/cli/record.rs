//! Automorphism files: a header line, then one `generator -> element` line
//! per generator. `#` starts a comment. A `csa` file without `matrix=`
//! also lists its structure constants as `ei*ej = element` for `i, j >= 2`
//! (`e1` is the identity).

use std::collections::BTreeMap;

use crate::csa::{CSAutomorphism, StructureConstantAlgebra};
use crate::diffop::{DiffOpAutomorphism, DiffOpElement};
use crate::error::{Error, Result};
use crate::multipoly::{MultiPoly, PolyAutomorphism};
use crate::powerseries::{SeriesAutomorphism, TruncatedSeries};
use crate::weyl::{WeylAutomorphism, WeylElement};

use super::config::{Kind, SessionConfig};
use super::parse::{evaluate, parse_element, parse_generator, parse_syntax, CsaText, Ident};
use super::session::{x_name, Element, Session};

/// The automorphism itself, by family.
#[derive(Clone, Debug, PartialEq)]
pub enum AutMap {
    Poly(PolyAutomorphism),
    Series(SeriesAutomorphism),
    DiffOp(DiffOpAutomorphism),
    Weyl(WeylAutomorphism),
    Csa(CSAutomorphism),
}

/// A parsed and validated automorphism file.
#[derive(Clone, Debug, PartialEq)]
pub struct AutRecord {
    pub config: SessionConfig,
    pub session: Session,
    pub map: AutMap,
}

/// The generators an automorphism file must assign, in canonical order.
pub fn required_generators(session: &Session) -> Vec<Ident> {
    match session {
        Session::Poly { n, .. } | Session::Series { n, .. } => (0..*n).map(Ident::X).collect(),
        Session::DiffOp { ring, levels } => {
            let p = ring.prime().get();
            let mut g: Vec<Ident> = (0..ring.nx()).map(Ident::X).collect();
            for i in 0..ring.nx() {
                let lv = ring.order_bound().map_or(*levels, |k| k[i] as usize);
                g.extend((0..lv).map(|s| Ident::D(i, p.pow(s as u32))));
            }
            g.extend((0..ring.ny()).map(Ident::Y));
            g
        }
        Session::Weyl(r) => {
            let mut g: Vec<Ident> = (0..r.n()).map(Ident::Q).collect();
            g.extend((0..r.n()).map(Ident::P));
            g.extend((0..r.m()).map(Ident::Y));
            g
        }
        Session::Csa(a) => (1..a.dim()).map(Ident::E).collect(),
    }
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

fn at_line(line: &Line<'_>, offset: usize, e: Error) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: offset + pos, msg: format!("line {}: {}", line.number, msg) },
        other => other,
    }
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Line { number: i + 1, text: l.split('#').next().unwrap_or("") })
        .filter(|l| !l.text.trim().is_empty())
        .collect()
}

/// Reads the `ei*ej = ...` lines of a table-based `csa` file.
fn structure_table(cfg: &SessionConfig, lines: &[&Line<'_>]) -> Result<StructureConstantAlgebra> {
    let (p, n) = (cfg.p, cfg.n);
    let text = CsaText { p, dim: n, table: None };
    let mut entries: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    for line in lines {
        let (lhs, rhs) = line.text.split_once('=').expect("caller checked");
        let tree = parse_syntax(lhs, p).map_err(|e| at_line(line, 0, e))?;
        let pair = match tree.terms.as_slice() {
            [t] if t.coeff == 1 && t.factors.len() == 2 && t.factors.iter().all(|f| f.exp == 1) => {
                match (t.factors[0].ident, t.factors[1].ident) {
                    (Ident::E(i), Ident::E(j)) if i >= 1 && j >= 1 && i < n && j < n => Some((i, j)),
                    _ => None,
                }
            }
            _ => None,
        };
        let pair = pair.ok_or_else(|| {
            at_line(line, 0, Error::parse(0, format!("expected ei*ej with 2 <= i, j <= {} before '='", n)))
        })?;
        let off = lhs.len() + 1;
        let tree = parse_syntax(rhs, p).map_err(|e| at_line(line, off, e))?;
        let v = evaluate(&text, &tree).map_err(|e| at_line(line, off, e))?;
        if entries.insert(pair, v).is_some() {
            return Err(at_line(line, 0, Error::parse(0, format!("e{}*e{} given twice", pair.0 + 1, pair.1 + 1))));
        }
    }
    let mut table = vec![vec![vec![0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            table[i][j] = if i == 0 {
                text.atom_vec(j)
            } else if j == 0 {
                text.atom_vec(i)
            } else {
                entries
                    .remove(&(i, j))
                    .ok_or_else(|| Error::parse(0, format!("missing structure constant line for e{}*e{}", i + 1, j + 1)))?
            };
        }
    }
    StructureConstantAlgebra::new(p, table)
}

impl CsaText<'_> {
    fn atom_vec(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }
}

/// Parses and validates an automorphism file.
pub fn parse_automorphism(text: &str) -> Result<AutRecord> {
    let lines = content_lines(text);
    let (header, rest) = lines.split_first().ok_or_else(|| Error::parse(0, "empty automorphism file"))?;
    let config = SessionConfig::parse_header(header.text).map_err(|e| at_line(header, 0, e))?;
    let (table_lines, gen_lines): (Vec<&Line<'_>>, Vec<&Line<'_>>) =
        rest.iter().partition(|l| !l.text.contains("->") && l.text.contains('='));
    let session = if config.kind == Kind::Csa && config.matrix.is_none() {
        Session::csa(&config, structure_table(&config, &table_lines)?)?
    } else {
        if let Some(l) = table_lines.first() {
            return Err(at_line(l, 0, Error::parse(0, "structure constants only belong in csa files without matrix=")));
        }
        Session::from_config(&config)?
    };
    let required = required_generators(&session);
    let mut images: BTreeMap<String, Element> = BTreeMap::new();
    for line in gen_lines {
        let (lhs, rhs) = line
            .text
            .split_once("->")
            .ok_or_else(|| at_line(line, 0, Error::parse(0, "expected 'generator -> element'")))?;
        let g = parse_generator(lhs).map_err(|e| at_line(line, 0, e))?;
        let optional_e1 = matches!(session, Session::Csa(_)) && g == Ident::E(0);
        if !required.contains(&g) && !optional_e1 {
            return Err(at_line(line, 0, Error::parse(0, format!("{} is not a generator of this {} file", g.name(), config.kind))));
        }
        let img = parse_element(rhs, &session).map_err(|e| at_line(line, lhs.len() + 2, e))?;
        if images.insert(g.name(), img).is_some() {
            return Err(at_line(line, 0, Error::parse(0, format!("{} is assigned twice", g.name()))));
        }
    }
    let mut take = |g: &Ident| {
        images.remove(&g.name()).ok_or_else(|| Error::parse(0, format!("missing line for generator {}", g.name())))
    };
    let ordered = required.iter().map(&mut take).collect::<Result<Vec<_>>>()?;
    let map = build_map(&session, ordered, take(&Ident::E(0)).ok())?;
    Ok(AutRecord { config, session, map })
}

fn build_map(session: &Session, images: Vec<Element>, e1: Option<Element>) -> Result<AutMap> {
    Ok(match session {
        Session::Poly { .. } => AutMap::Poly(PolyAutomorphism::new(
            images.into_iter().map(|e| if let Element::Poly(f) = e { f } else { unreachable!() }).collect(),
        )?),
        Session::Series { .. } => AutMap::Series(SeriesAutomorphism::new(
            images.into_iter().map(|e| if let Element::Series(f) = e { f } else { unreachable!() }).collect(),
        )?),
        Session::DiffOp { ring, levels } => {
            let mut it = images.into_iter().map(|e| if let Element::DiffOp(a) = e { a } else { unreachable!() });
            let x: Vec<DiffOpElement> = it.by_ref().take(ring.nx()).collect();
            let d = (0..ring.nx())
                .map(|i| it.by_ref().take(ring.order_bound().map_or(*levels, |k| k[i] as usize)).collect())
                .collect();
            AutMap::DiffOp(DiffOpAutomorphism::new(ring.clone(), x, d, it.collect())?)
        }
        Session::Weyl(r) => {
            let mut it = images.into_iter().map(|e| if let Element::Weyl(a) = e { a } else { unreachable!() });
            let q: Vec<WeylElement> = it.by_ref().take(r.n()).collect();
            let p: Vec<WeylElement> = it.by_ref().take(r.n()).collect();
            AutMap::Weyl(WeylAutomorphism::new(r.clone(), q, p, it.collect())?)
        }
        Session::Csa(alg) => {
            let first = match e1 {
                Some(Element::Csa(v)) => v,
                _ => alg.one(),
            };
            let rest = images.into_iter().map(|e| if let Element::Csa(v) = e { v } else { unreachable!() });
            AutMap::Csa(CSAutomorphism::new(alg, std::iter::once(first).chain(rest).collect())?)
        }
    })
}

impl AutRecord {
    /// Wraps an automorphism computed in the same session as `self`.
    pub fn with_map(&self, map: AutMap) -> AutRecord {
        AutRecord { config: self.config.clone(), session: self.session.clone(), map }
    }

    /// `(name, generator, image)` in canonical order.
    pub fn generators(&self) -> Vec<(String, Element, Element)> {
        match (&self.map, &self.session) {
            (AutMap::Poly(a), _) => {
                let (p, n) = (a.prime(), a.nvars());
                (0..n)
                    .map(|i| (x_name(i), Element::Poly(MultiPoly::var(p, n, i)), Element::Poly(a.images()[i].clone())))
                    .collect()
            }
            (AutMap::Series(a), _) => {
                let (p, n, d) = (a.prime(), a.nvars(), a.bound());
                (0..n)
                    .map(|i| {
                        (x_name(i), Element::Series(TruncatedSeries::var(p, n, i, d)), Element::Series(a.images()[i].clone()))
                    })
                    .collect()
            }
            (AutMap::DiffOp(a), _) => a
                .generators()
                .into_iter()
                .map(|(s, g, i)| (s, Element::DiffOp(g), Element::DiffOp(i)))
                .collect(),
            (AutMap::Weyl(a), _) => {
                a.generators().into_iter().map(|(s, g, i)| (s, Element::Weyl(g), Element::Weyl(i))).collect()
            }
            (AutMap::Csa(a), Session::Csa(alg)) => (1..alg.dim())
                .map(|i| (format!("e{}", i + 1), Element::Csa(alg.basis(i)), Element::Csa(a.images()[i].clone())))
                .collect(),
            (AutMap::Csa(_), _) => unreachable!("csa map outside a csa session"),
        }
    }

    /// The canonical file text; parsing it gives back an equal record.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.config);
        if let (Session::Csa(alg), None) = (&self.session, self.config.matrix) {
            for i in 1..alg.dim() {
                for j in 1..alg.dim() {
                    let e = Element::Csa(alg.table()[i][j].clone());
                    out.push_str(&format!("e{}*e{} = {}\n", i + 1, j + 1, e.render()));
                }
            }
        }
        for (name, _, img) in self.generators() {
            out.push_str(&format!("{} -> {}\n", name, img.render()));
        }
        out
    }

    /// `sigma(a)`.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        let mismatch = || Error::ContextMismatch("element does not belong to the automorphism's algebra".into());
        Ok(match (&self.map, a) {
            (AutMap::Poly(s), Element::Poly(f)) => Element::Poly(s.apply(f)?),
            (AutMap::Series(s), Element::Series(f)) => Element::Series(s.apply(f)?),
            (AutMap::DiffOp(s), Element::DiffOp(f)) => Element::DiffOp(s.apply(f)?),
            (AutMap::Weyl(s), Element::Weyl(f)) => Element::Weyl(s.apply(f)?),
            (AutMap::Csa(s), Element::Csa(v)) => match &self.session {
                Session::Csa(alg) if v.len() == alg.dim() => Element::Csa(s.apply(alg, v)),
                _ => return Err(mismatch()),
            },
            _ => return Err(mismatch()),
        })
    }

    /// `self o other`, both in the same algebra.
    pub fn compose(&self, other: &AutRecord) -> Result<AutRecord> {
        if self.session != other.session || self.config != other.config {
            return Err(Error::ContextMismatch("automorphisms of different algebras".into()));
        }
        let map = match (&self.map, &other.map) {
            (AutMap::Poly(a), AutMap::Poly(b)) => AutMap::Poly(a.compose(b)?),
            (AutMap::Series(a), AutMap::Series(b)) => AutMap::Series(a.compose(b)?),
            (AutMap::DiffOp(a), AutMap::DiffOp(b)) => AutMap::DiffOp(a.compose(b)?),
            (AutMap::Weyl(a), AutMap::Weyl(b)) => AutMap::Weyl(a.compose(b)?),
            (AutMap::Csa(a), AutMap::Csa(b)) => {
                let Session::Csa(alg) = &self.session else { unreachable!() };
                AutMap::Csa(CSAutomorphism::new(alg, b.images().iter().map(|v| a.apply(alg, v)).collect())?)
            }
            _ => unreachable!("equal sessions give equal families"),
        };
        Ok(self.with_map(map))
    }

    pub fn is_identity(&self) -> bool {
        self.generators().iter().all(|(_, g, img)| g == img)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHEAR: &str = "# shear over F_3\npoly 3 2 0\nx1 -> x1\nx2 -> x2 + x1^2   # the perturbation\n";

    #[test]
    fn poly_file() {
        let rec = parse_automorphism(SHEAR).unwrap();
        let AutMap::Poly(a) = &rec.map else { panic!() };
        assert!(a.jacobian().is_constant());
        assert_eq!(a.jacobian().constant_term(), 1);
        assert_eq!(rec.render(), "poly 3 2 0\nx1 -> x1\nx2 -> x2 + x1^2\n");
        assert_eq!(parse_automorphism(&rec.render()).unwrap(), rec);
    }

    #[test]
    fn identity_files() {
        let files = [
            "poly 2 1 0\nx1 -> x1",
            "series 3 2 0 D=4\nx1 -> x1\nx2 -> x2",
            "diffop 3 1 0 Kmax=2\nx1 -> x1\nD1[1] -> D1[1]\nD1[3] -> D1[3]",
            "diffop_poly 2 1 1 Kmax=1\nx1 -> x1\nD1[1] -> D1[1]\ny1 -> y1",
            "tk 2 2 0 k=2,1\nx1 -> x1\nx2 -> x2\nD1[1] -> D1[1]\nD1[2] -> D1[2]\nD2[1] -> D2[1]",
            "weyl 5 1 0\nq1 -> q1\np1 -> p1",
            "weyl_poly 3 1 1\nq1 -> q1\np1 -> p1\ny1 -> y1",
            "csa 3 4 0 matrix=2\ne2 -> e2\ne3 -> e3\ne4 -> e4",
        ];
        for f in files {
            let rec = parse_automorphism(f).unwrap();
            assert!(rec.is_identity(), "{}", f);
            assert_eq!(parse_automorphism(&rec.render()).unwrap(), rec);
        }
    }

    #[test]
    fn missing_and_extra_lines() {
        let e = parse_automorphism("diffop 3 1 0 Kmax=2\nx1 -> x1\nD1[1] -> D1[1]").unwrap_err();
        assert_eq!(e, Error::parse(0, "missing line for generator D1[3]"));
        let e = parse_automorphism("poly 3 1 0\nx1 -> x1\nx2 -> x1").unwrap_err();
        assert!(matches!(e, Error::Parse { ref msg, .. } if msg.starts_with("line 3:")), "{e}");
        let e = parse_automorphism("poly 3 1 0\nx1 -> x1 +* 2").unwrap_err();
        assert_eq!(e, Error::Parse { pos: 10, msg: "line 2: unexpected '*'".into() });
    }

    #[test]
    fn weyl_relation_named() {
        let e = parse_automorphism("weyl 3 1 0\nq1 -> q1\np1 -> 2*p1").unwrap_err();
        assert_eq!(e, Error::RelationViolation("[p1', q1'] != 1".into()));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn csa_with_table() {
        // M_2 written out as an explicit table.
        let alg = StructureConstantAlgebra::matrix_algebra(crate::PrimeChar::new(3).unwrap(), 2);
        let cfg = SessionConfig::parse_header("csa 3 4 0 matrix=2").unwrap();
        let rec = AutRecord {
            config: SessionConfig { matrix: None, ..cfg.clone() },
            session: Session::csa(&cfg, StructureConstantAlgebra::new(alg.prime(), alg.table().to_vec()).unwrap()).unwrap(),
            map: AutMap::Csa(CSAutomorphism::identity(&alg)),
        };
        let text = rec.render();
        assert!(text.contains("e2*e2 = "));
        assert_eq!(parse_automorphism(&text).unwrap(), rec);
        let missing: String = text.lines().filter(|l| !l.starts_with("e3*e4")).map(|l| format!("{}\n", l)).collect();
        assert_eq!(parse_automorphism(&missing).unwrap_err(), Error::parse(0, "missing structure constant line for e3*e4"));
    }
}
