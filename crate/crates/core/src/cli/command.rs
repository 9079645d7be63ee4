//! `invert`, `apply`, `compose`, `verify` and `taylor`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::csa::{density_solve, invert_csa, matrix_realization, FunctionalRealization, StructureConstantAlgebra};
use crate::diffop::{invert_diffop_aut, taylor_diffop};
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::multipoly::{invert_poly_aut, new_coordinate_coefficients, MultiPoly, PolyAutomorphism};
use crate::powerseries::{invert_series_aut, SeriesAutomorphism};
use crate::random;
use crate::weyl::{invert_weyl_aut, taylor_weyl};

use super::config::SessionConfig;
use super::parse::parse_element;
use super::record::{parse_automorphism, AutMap, AutRecord};
use super::session::{Element, Session};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Invert,
    Apply,
    Compose,
    Verify,
    Taylor,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        Ok(match s {
            "invert" => Command::Invert,
            "apply" => Command::Apply,
            "compose" => Command::Compose,
            "verify" => Command::Verify,
            "taylor" => Command::Taylor,
            _ => return Err(Error::InvalidConfig(format!("unknown command '{}'", s))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Invert => "invert",
            Command::Apply => "apply",
            Command::Compose => "compose",
            Command::Verify => "verify",
            Command::Taylor => "taylor",
        })
    }
}

/// Command inputs as text: automorphism files (contents, not paths) and an element.
#[derive(Clone, Debug, Default)]
pub struct Inputs {
    pub automorphisms: Vec<String>,
    pub element: Option<String>,
    /// Enables random sampling in `verify`.
    pub seed: Option<u64>,
}

/// Rendered output. `failure` is set when `verify` finds a counterexample;
/// the output still lists every check.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub output: String,
    pub failure: Option<Error>,
}

impl Report {
    fn ok(output: String) -> Self {
        Report { output, failure: None }
    }
}

/// Number of random samples `verify --seed` checks.
pub const VERIFY_SAMPLES: usize = 8;

fn realization(alg: &StructureConstantAlgebra) -> Result<FunctionalRealization> {
    if alg.matrix_size().is_some() {
        matrix_realization(alg)
    } else {
        density_solve(alg)
    }
}

/// The verified inverse of a record.
pub fn invert_record(rec: &AutRecord) -> Result<AutRecord> {
    let map = match &rec.map {
        AutMap::Poly(a) => AutMap::Poly(invert_poly_aut(a)?),
        AutMap::Series(a) => AutMap::Series(invert_series_aut(a)?),
        AutMap::DiffOp(a) => AutMap::DiffOp(invert_diffop_aut(a)?),
        AutMap::Weyl(a) => AutMap::Weyl(invert_weyl_aut(a)?),
        AutMap::Csa(a) => {
            let Session::Csa(alg) = &rec.session else { unreachable!("csa map outside a csa session") };
            AutMap::Csa(invert_csa(alg, &realization(alg)?, a)?)
        }
    };
    Ok(rec.with_map(map))
}

/// Checks `sigma(tau(g)) = g` and `tau(sigma(g)) = g` on every generator, and
/// on `samples` random elements drawn from `seed`.
pub fn verify_pair(sigma: &AutRecord, tau: &AutRecord, seed: Option<u64>) -> Result<Report> {
    if sigma.session != tau.session || sigma.config != tau.config {
        return Err(Error::ContextMismatch("automorphisms of different algebras".into()));
    }
    let mut out = String::new();
    let mut failure = None;
    let mut check = |label: &str, g: &Element| -> Result<()> {
        let st = sigma.apply(&tau.apply(g)?)?;
        let ts = tau.apply(&sigma.apply(g)?)?;
        if st == *g && ts == *g {
            out.push_str(&format!("{}: pass\n", label));
        } else {
            let which = if st != *g { "sigma(tau(g))" } else { "tau(sigma(g))" };
            let got = if st != *g { st } else { ts };
            out.push_str(&format!("{}: FAIL {} = {}\n", label, which, got.render()));
            failure.get_or_insert_with(|| Error::VerificationFailed(format!("{} is not fixed by {}", label, which)));
        }
        Ok(())
    };
    for (name, g, _) in sigma.generators() {
        check(&name, &g)?;
    }
    if let Some(seed) = seed {
        let mut rng = random::rng(seed);
        for s in 0..VERIFY_SAMPLES {
            let e = random::random_element(&mut rng, &sigma.session);
            check(&format!("sample {} [{}]", s + 1, e.render()), &e)?;
        }
    }
    Ok(Report { output: out, failure })
}

fn tuple(v: &[u32]) -> String {
    let s: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", s.join(","))
}

fn check_divided_taylor(f: &MultiPoly, coeffs: &BTreeMap<Monomial, u64>) -> Result<()> {
    let support: BTreeSet<&Monomial> = f.terms().keys().chain(coeffs.keys()).collect();
    for a in support {
        let direct = f.divided_derivative(a.exps()).constant_term();
        if coeffs.get(a).copied().unwrap_or(0) != direct {
            return Err(Error::InvariantViolation(format!("Taylor coefficient at {:?} disagrees with d^[alpha] f(0)", a)));
        }
    }
    Ok(())
}

/// The coefficient table of `a`, one `key : c` line per nonzero coefficient
/// in graded-lex order.
pub fn taylor_table(a: &Element, session: &Session) -> Result<String> {
    let mut rows: Vec<(Monomial, String, u64)> = Vec::new();
    match a {
        Element::Poly(f) => {
            let id = PolyAutomorphism::identity(f.prime(), f.nvars());
            let coeffs: BTreeMap<Monomial, u64> =
                new_coordinate_coefficients(&id, f)?.into_iter().map(|(m, c)| (m, c.value())).collect();
            check_divided_taylor(f, &coeffs)?;
            for (m, c) in coeffs {
                let label = format!("alpha={}", tuple(m.exps()));
                rows.push((m, label, c));
            }
        }
        Element::Series(f) => {
            let id = SeriesAutomorphism::identity(f.prime(), f.nvars(), f.bound());
            let g = id.coordinates(f)?;
            let coeffs: BTreeMap<Monomial, u64> = g.poly().terms().clone();
            check_divided_taylor(f.poly(), &coeffs)?;
            for (m, c) in coeffs {
                let label = format!("alpha={}", tuple(m.exps()));
                rows.push((m, label, c));
            }
        }
        Element::DiffOp(x) => {
            for ((al, be, ga), c) in taylor_diffop(x)? {
                let label = format!("alpha={} beta={} gamma={}", tuple(&al), tuple(&be), tuple(&ga));
                rows.push((Monomial::concat(&[&al, &be, &ga]), label, c));
            }
        }
        Element::Weyl(x) => {
            for ((al, be, ga), c) in taylor_weyl(x)? {
                let label = format!("alpha={} beta={} gamma={}", tuple(&al), tuple(&be), tuple(&ga));
                rows.push((Monomial::concat(&[&al, &be, &ga]), label, c));
            }
        }
        Element::Csa(v) => {
            let Session::Csa(alg) = session else {
                return Err(Error::ContextMismatch("csa element outside a csa session".into()));
            };
            let real = realization(alg)?;
            for j in 0..alg.dim() {
                let val = real.evaluate(alg, j, v);
                if val[1..].iter().any(|&c| c != 0) || val[0] != v[j] {
                    return Err(Error::InvariantViolation(format!("coordinate functional {} is not realised", j + 1)));
                }
                if val[0] != 0 {
                    let mut key = vec![0; alg.dim()];
                    key[j] = 1;
                    rows.push((Monomial::new(key), format!("e{}", j + 1), val[0]));
                }
            }
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows.into_iter().map(|(_, label, c)| format!("{} : {}\n", label, c)).collect())
}

fn check_config(config: Option<&SessionConfig>, rec: &AutRecord) -> Result<()> {
    match config {
        Some(c) if *c != rec.config => Err(Error::InvalidConfig(format!(
            "session parameters '{}' disagree with the automorphism header '{}'",
            c, rec.config
        ))),
        _ => Ok(()),
    }
}

fn need(n: usize, recs: &[AutRecord], cmd: Command) -> Result<()> {
    if recs.len() != n {
        return Err(Error::InvalidConfig(format!("{} takes {} automorphism file(s), got {}", cmd, n, recs.len())));
    }
    Ok(())
}

/// Runs one command. `config`, when given, must agree with every automorphism
/// header; it is the only source of the algebra when no automorphism is given.
pub fn run_command(cmd: Command, config: Option<&SessionConfig>, inputs: &Inputs) -> Result<Report> {
    let recs = inputs.automorphisms.iter().map(|t| parse_automorphism(t)).collect::<Result<Vec<_>>>()?;
    for r in &recs {
        check_config(config, r)?;
    }
    let session = match (recs.first(), config) {
        (Some(r), _) => r.session.clone(),
        (None, Some(c)) => Session::from_config(c)?,
        (None, None) => return Err(Error::InvalidConfig("no algebra: give an automorphism file or --kind".into())),
    };
    let element = || {
        let text = inputs.element.as_deref().ok_or_else(|| Error::InvalidConfig(format!("{} needs --element", cmd)))?;
        parse_element(text, &session)
    };
    match cmd {
        Command::Invert => {
            need(1, &recs, cmd)?;
            Ok(Report::ok(invert_record(&recs[0])?.render()))
        }
        Command::Apply => {
            need(1, &recs, cmd)?;
            Ok(Report::ok(format!("{}\n", recs[0].apply(&element()?)?.render())))
        }
        Command::Compose => {
            need(2, &recs, cmd)?;
            Ok(Report::ok(recs[0].compose(&recs[1])?.render()))
        }
        Command::Verify => match recs.len() {
            1 => verify_pair(&recs[0], &invert_record(&recs[0])?, inputs.seed),
            2 => verify_pair(&recs[0], &recs[1], inputs.seed),
            n => Err(Error::InvalidConfig(format!("verify takes 1 or 2 automorphism files, got {}", n))),
        },
        Command::Taylor => {
            if recs.len() > 1 {
                return Err(Error::InvalidConfig("taylor takes at most one automorphism file".into()));
            }
            Ok(Report::ok(taylor_table(&element()?, &session)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Kind;

    fn inputs(auts: &[&str], element: Option<&str>) -> Inputs {
        Inputs { automorphisms: auts.iter().map(|s| s.to_string()).collect(), element: element.map(String::from), seed: None }
    }

    const SHEAR: &str = "poly 3 2 0\nx1 -> x1\nx2 -> x2 + x1^2\n";

    #[test]
    fn invert_shear() {
        let r = run_command(Command::Invert, None, &inputs(&[SHEAR], None)).unwrap();
        assert!(r.output.contains("x2 -> x2 + 2*x1^2"), "{}", r.output);
        let inv = r.output.clone();
        let v = run_command(Command::Verify, None, &inputs(&[SHEAR, &inv], None)).unwrap();
        assert_eq!(v.failure, None);
        assert_eq!(v.output, "x1: pass\nx2: pass\n");
    }

    #[test]
    fn invert_identity_is_identity() {
        let id = "weyl_poly 3 1 1\nq1 -> q1\np1 -> p1\ny1 -> y1\n";
        assert_eq!(run_command(Command::Invert, None, &inputs(&[id], None)).unwrap().output, id);
    }

    #[test]
    fn verify_names_failing_generator() {
        let v = run_command(Command::Verify, None, &inputs(&[SHEAR, SHEAR], None)).unwrap();
        assert_eq!(v.failure, Some(Error::VerificationFailed("x2 is not fixed by sigma(tau(g))".into())));
        assert!(v.output.contains("x1: pass\nx2: FAIL"));
        assert_eq!(v.failure.unwrap().exit_code(), 3);
    }

    #[test]
    fn verify_with_samples() {
        let mut inp = inputs(&[SHEAR], None);
        inp.seed = Some(11);
        let v = run_command(Command::Verify, None, &inp).unwrap();
        assert_eq!(v.failure, None);
        assert_eq!(v.output.lines().count(), 2 + VERIFY_SAMPLES);
        assert_eq!(run_command(Command::Verify, None, &inp).unwrap(), v);
    }

    #[test]
    fn apply_and_compose() {
        let a = run_command(Command::Apply, None, &inputs(&[SHEAR], Some("x2^2"))).unwrap();
        assert_eq!(a.output, "x2^2 + 2*x1^2*x2 + x1^4\n");
        let c = run_command(Command::Compose, None, &inputs(&[SHEAR, SHEAR], None)).unwrap();
        assert_eq!(c.output, "poly 3 2 0\nx1 -> x1\nx2 -> x2 + 2*x1^2\n");
    }

    #[test]
    fn taylor_tables() {
        let cfg = SessionConfig::new(Kind::Weyl, 5, 1, 0).unwrap();
        let t = run_command(Command::Taylor, Some(&cfg), &inputs(&[], Some("p1*q1"))).unwrap();
        assert_eq!(t.output, "alpha=(0) beta=(0) gamma=(0,0) : 1\nalpha=(1) beta=(1) gamma=(0,0) : 1\n");
        let cfg = SessionConfig::new(Kind::Poly, 3, 2, 0).unwrap();
        let t = run_command(Command::Taylor, Some(&cfg), &inputs(&[], Some("x2 + 2*x1^2*x2 + 1"))).unwrap();
        assert_eq!(t.output, "alpha=(0,0) : 1\nalpha=(0,1) : 1\nalpha=(2,1) : 2\n");
        let cfg = SessionConfig::new(Kind::DiffOp, 3, 1, 0).unwrap().with_kmax(1);
        let t = run_command(Command::Taylor, Some(&cfg), &inputs(&[], Some("D1[1]*x1"))).unwrap();
        assert_eq!(t.output, "alpha=(0) beta=(0) gamma=() : 1\nalpha=(1) beta=(1) gamma=() : 1\n");
    }

    #[test]
    fn csa_inverse_and_coordinates() {
        let f = "csa 5 4 0 matrix=2\n";
        let rec = parse_automorphism(&format!("{}e2 -> e2\ne3 -> e3\ne4 -> e4\n", f)).unwrap();
        let inv = invert_record(&rec).unwrap();
        assert!(inv.is_identity());
        let cfg = SessionConfig::parse_header(f).unwrap();
        let t = run_command(Command::Taylor, Some(&cfg), &inputs(&[], Some("3 + 2*e3"))).unwrap();
        assert_eq!(t.output, "e1 : 3\ne3 : 2\n");
    }

    #[test]
    fn header_disagreement() {
        let cfg = SessionConfig::new(Kind::Poly, 5, 2, 0).unwrap();
        let e = run_command(Command::Invert, Some(&cfg), &inputs(&[SHEAR], None)).unwrap_err();
        assert!(matches!(e, Error::InvalidConfig(_)));
    }
}
