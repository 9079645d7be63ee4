//! Python bindings for `autinv`.
//!
//! Automorphisms travel as the same text format the command line reads and
//! writes; elements are strings in the element grammar.

use autinv::cli::{invert_record, parse_automorphism, parse_element, taylor_table, verify_pair, AutRecord, Kind, Session, SessionConfig};
use autinv::{primefield, Error, PrimeChar};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(pyautinv, AutinvError, PyException);
create_exception!(pyautinv, ParseError, AutinvError);
create_exception!(pyautinv, ValidationError, AutinvError);
create_exception!(pyautinv, VerificationError, AutinvError);
create_exception!(pyautinv, ResourceError, AutinvError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        1 => ParseError::new_err(msg),
        2 => ValidationError::new_err(msg),
        3 => VerificationError::new_err(msg),
        4 => ResourceError::new_err(msg),
        _ => AutinvError::new_err(msg),
    }
}

fn prime(p: u64) -> PyResult<PrimeChar> {
    PrimeChar::new(p).map_err(py_err)
}

/// An automorphism together with its algebra.
#[pyclass(module = "pyautinv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Automorphism {
    rec: AutRecord,
}

#[pymethods]
impl Automorphism {
    /// Parses an automorphism file's contents.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Automorphism { rec: parse_automorphism(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| py_err(Error::Io(format!("{}: {}", path.display(), e))))?;
        Self::new(&text)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.rec.config.kind.name()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.rec.config.p.get()
    }

    #[getter]
    fn header(&self) -> String {
        self.rec.config.to_string()
    }

    /// `(generator, image)` pairs in file order.
    fn images(&self) -> Vec<(String, String)> {
        self.rec.generators().into_iter().map(|(name, _, img)| (name, self.rec.session.render(&img))).collect()
    }

    fn invert(&self) -> PyResult<Automorphism> {
        Ok(Automorphism { rec: invert_record(&self.rec).map_err(py_err)? })
    }

    /// `self ∘ other`: apply `other` first.
    fn compose(&self, other: &Automorphism) -> PyResult<Automorphism> {
        Ok(Automorphism { rec: self.rec.compose(&other.rec).map_err(py_err)? })
    }

    fn apply(&self, element: &str) -> PyResult<String> {
        let a = parse_element(element, &self.rec.session).map_err(py_err)?;
        let b = self.rec.apply(&a).map_err(py_err)?;
        Ok(self.rec.session.render(&b))
    }

    fn is_identity(&self) -> bool {
        self.rec.is_identity()
    }

    /// Checks `self` and `other` are mutually inverse. Returns the report
    /// lines; raises `VerificationError` on a counterexample.
    #[pyo3(signature = (other, seed=None))]
    fn verify_inverse(&self, other: &Automorphism, seed: Option<u64>) -> PyResult<Vec<String>> {
        let report = verify_pair(&self.rec, &other.rec, seed).map_err(py_err)?;
        match report.failure {
            Some(e) => Err(py_err(e)),
            None => Ok(report.output.lines().map(str::to_string).collect()),
        }
    }

    /// The coefficient table of `element` in this algebra's basis.
    fn taylor(&self, element: &str) -> PyResult<Vec<String>> {
        table(element, &self.rec.session)
    }

    fn render(&self) -> String {
        self.rec.render()
    }

    fn __str__(&self) -> String {
        self.rec.render()
    }

    fn __repr__(&self) -> String {
        format!("Automorphism('{}')", self.rec.config)
    }

    fn __eq__(&self, other: &Automorphism) -> bool {
        self.rec == other.rec
    }
}

fn table(element: &str, session: &Session) -> PyResult<Vec<String>> {
    let a = parse_element(element, session).map_err(py_err)?;
    let t = taylor_table(&a, session).map_err(py_err)?;
    Ok(t.lines().map(str::to_string).collect())
}

/// Coefficient table of `element` in a session given by header fields.
#[pyfunction]
#[pyo3(signature = (kind, p, n, element, m=0, k=None, degree_bound=None, kmax=None))]
#[allow(clippy::too_many_arguments)]
fn taylor(
    kind: &str,
    p: u64,
    n: usize,
    element: &str,
    m: usize,
    k: Option<Vec<u32>>,
    degree_bound: Option<u64>,
    kmax: Option<usize>,
) -> PyResult<Vec<String>> {
    let kind: Kind = kind.parse().map_err(py_err)?;
    let mut cfg = SessionConfig::new(kind, p, n, m).map_err(py_err)?;
    cfg.k = k;
    cfg.degree_bound = degree_bound;
    cfg.kmax = kmax;
    cfg.validate().map_err(py_err)?;
    let session = Session::from_config(&cfg).map_err(py_err)?;
    table(element, &session)
}

/// `C(b, a) mod p` by Lucas' theorem.
#[pyfunction]
fn binom_mod_p(b: u64, a: u64, p: u64) -> PyResult<u64> {
    Ok(primefield::binom_mod_p(b, a, prime(p)?).value())
}

/// `1/j! mod p`; raises for `j >= p`.
#[pyfunction]
fn factorial_inv(j: u64, p: u64) -> PyResult<u64> {
    Ok(primefield::factorial_inv(j, prime(p)?).map_err(py_err)?.value())
}

#[pymodule]
fn pyautinv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Automorphism>()?;
    m.add_function(wrap_pyfunction!(taylor, m)?)?;
    m.add_function(wrap_pyfunction!(binom_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(factorial_inv, m)?)?;
    m.add("AutinvError", py.get_type::<AutinvError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("VerificationError", py.get_type::<VerificationError>())?;
    m.add("ResourceError", py.get_type::<ResourceError>())?;
    Ok(())
}
