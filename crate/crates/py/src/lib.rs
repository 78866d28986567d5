//! Python bindings for `orbicover`.

use num_bigint::BigUint;
use orbicover::certify::{self, CertOptions, Certificate, PairInput};
use orbicover::finfield::FqContext;
use orbicover::matgroup;
use orbicover::orders::{self, FactoredOrder, Mode, PExponent};
use orbicover::quadform::{AdmissiblePair, FqForm, SquareClass};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn math_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_class(s: Option<&str>) -> PyResult<Option<SquareClass>> {
    match s {
        None => Ok(None),
        Some("square") => Ok(Some(SquareClass::Square)),
        Some("nonsquare") => Ok(Some(SquareClass::Nonsquare)),
        Some(other) => Err(PyValueError::new_err(format!("unknown square class {other:?}"))),
    }
}

fn options(mode: &str, with_witness: bool, seed: u64) -> PyResult<CertOptions> {
    Ok(CertOptions { mode: mode.parse::<Mode>().map_err(PyValueError::new_err)?, with_witness, seed })
}

fn prime_field_form(diagonal: Vec<i64>, p: u64) -> PyResult<FqForm> {
    let ctx = FqContext::of_degree(p, 1).map_err(value_err)?;
    Ok(FqForm::from_ints(ctx, &diagonal))
}

/// A group order `p^X · Π (p^a ± 1)`.
#[pyclass(name = "FactoredOrder", module = "orbicover", frozen)]
struct PyFactoredOrder(FactoredOrder);

#[pymethods]
impl PyFactoredOrder {
    #[getter]
    fn p(&self) -> u64 {
        self.0.p
    }

    /// The exponent of `p`, or `None` when unbounded.
    #[getter]
    fn p_exponent(&self) -> Option<u64> {
        match self.0.p_exponent {
            PExponent::Bounded(x) => Some(x),
            PExponent::Unbounded => None,
        }
    }

    /// `(a, sign)` pairs, one per factor `p^a + sign`.
    #[getter]
    fn factors(&self) -> Vec<(u32, i8)> {
        self.0.factors.clone()
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    fn value(&self) -> PyResult<BigUint> {
        self.0.evaluate().ok_or_else(|| PyValueError::new_err("order has an unbounded p-part"))
    }

    fn prime_to_p_part(&self) -> BigUint {
        self.0.prime_to_p_part()
    }

    fn divisible_by(&self, ell: BigUint) -> PyResult<bool> {
        orders::prime_divides_factored(&ell, &self.0).map_err(value_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FactoredOrder({:?}, {})", self.0.label, self.0)
    }
}

/// A certificate of any kind, as built or parsed.
#[pyclass(name = "Certificate", module = "orbicover", frozen)]
struct PyCertificate(Certificate);

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Certificate::from_json(text).map(Self).map_err(value_err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Re-derives every claim. Returns `(passed, [(check, passed, detail)])`.
    fn verify(&self) -> (bool, Vec<(String, bool, String)>) {
        let report = certify::verify_certificate(&self.0);
        let checks = report.checks.into_iter().map(|c| (c.name, c.passed, c.detail)).collect();
        (report.passed, checks)
    }

    fn __repr__(&self) -> String {
        format!("Certificate(kind={:?})", self.0.kind())
    }
}

/// A totally real field with a quadratic form of signature `(m, 1)` at one
/// real place, read from the JSON input format.
#[pyclass(name = "AdmissiblePair", module = "orbicover", frozen)]
struct PyAdmissiblePair(AdmissiblePair);

#[pymethods]
impl PyAdmissiblePair {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let input = PairInput::from_json(text).map_err(value_err)?;
        input.to_pair().map(Self).map_err(value_err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    /// Good primes up to `bound` as `(p, residue degree, ideal)` triples.
    fn good_primes(&self, bound: u64) -> Vec<(u64, usize, String)> {
        certify::good_primes(&self.0, bound)
            .good
            .into_iter()
            .map(|gp| (gp.pf.p, gp.pf.residue_degree, gp.pf.to_string()))
            .collect()
    }

    #[pyo3(signature = (p, mode = "paper", with_witness = false, seed = 0))]
    fn certify_prime(&self, p: u64, mode: &str, with_witness: bool, seed: u64) -> PyResult<Vec<PyCertificate>> {
        let opts = options(mode, with_witness, seed)?;
        let good = certify::good_primes_over(&self.0, p).map_err(math_err)?;
        good.iter()
            .map(|gp| certify::build_certificate(&self.0, gp, &opts))
            .map(|c| c.map(|c| PyCertificate(Certificate::Equivalence(c))).map_err(math_err))
            .collect()
    }

    #[pyo3(signature = (bound = 1000, mode = "paper", with_witness = false, seed = 0))]
    fn certify_pair(&self, bound: u64, mode: &str, with_witness: bool, seed: u64) -> PyResult<PyCertificate> {
        let opts = options(mode, with_witness, seed)?;
        let cert = certify::build_pair_certificate(&self.0, bound, &opts).map_err(math_err)?;
        Ok(PyCertificate(Certificate::IsospectralPair(cert)))
    }

    #[pyo3(signature = (depth, bound = 1000, mode = "paper", with_witness = false, seed = 0))]
    fn certify_tower(
        &self,
        depth: usize,
        bound: u64,
        mode: &str,
        with_witness: bool,
        seed: u64,
    ) -> PyResult<PyCertificate> {
        let opts = options(mode, with_witness, seed)?;
        let cert = certify::build_tower_certificate(&self.0, depth, bound, &opts).map_err(math_err)?;
        Ok(PyCertificate(Certificate::Tower(cert)))
    }
}

/// `|SO(dim; p^r)|` in factored form. Even `dim` needs `square_class`.
#[pyfunction]
#[pyo3(signature = (dim, p, r = 1, square_class = None))]
fn so_order(dim: usize, p: u64, r: u32, square_class: Option<&str>) -> PyResult<PyFactoredOrder> {
    orders::so_order(dim, p, r, parse_class(square_class)?).map(PyFactoredOrder).map_err(value_err)
}

/// Counts `SO(q)` for a diagonal form over `F_p` by enumeration.
#[pyfunction]
fn brute_force_so_count(diagonal: Vec<i64>, p: u64) -> PyResult<BigUint> {
    matgroup::brute_force_so_count(&prime_field_form(diagonal, p)?).map_err(math_err)
}

/// `|SO(q)|` for a diagonal form over `F_p` by counting points on spheres.
#[pyfunction]
fn point_count_so_order(diagonal: Vec<i64>, p: u64) -> PyResult<BigUint> {
    matgroup::point_count_so_order(&prime_field_form(diagonal, p)?).map_err(math_err)
}

/// Smallest prime `ℓ` with `ord_ℓ(p) = 2d`.
#[pyfunction]
#[pyo3(signature = (p, d, seed = 0))]
fn zsigmondy_prime(p: u64, d: u32, seed: u64) -> PyResult<BigUint> {
    orders::zsigmondy_prime(p, d, seed).map_err(math_err)
}

#[pyfunction]
#[pyo3(signature = (ell, p, seed = 0))]
fn multiplicative_order(ell: BigUint, p: u64, seed: u64) -> PyResult<BigUint> {
    orders::DivisibilityOracle::new(&ell, p, seed).map(|o| o.order().clone()).map_err(value_err)
}

#[pymodule(name = "orbicover")]
fn orbicover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFactoredOrder>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyAdmissiblePair>()?;
    m.add_function(wrap_pyfunction!(so_order, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_so_count, m)?)?;
    m.add_function(wrap_pyfunction!(point_count_so_order, m)?)?;
    m.add_function(wrap_pyfunction!(zsigmondy_prime, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicative_order, m)?)?;
    m.add("SCHEMA_VERSION", certify::SCHEMA_VERSION)?;
    Ok(())
}
