//! Python bindings: matrices, the rewriting identities, searches, and CNF export.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nilclean::{Gf2Poly, SearchOptions, Strategy};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_strategy(s: &str) -> PyResult<Strategy> {
    s.parse().map_err(value_err)
}

fn parse_poly(s: &str) -> PyResult<Gf2Poly> {
    s.parse().map_err(value_err)
}

/// Square matrix over GF(2).
#[pyclass(name = "Gf2Matrix", frozen, eq, hash, from_py_object, module = "pynilclean")]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyGf2Matrix {
    inner: nilclean::Gf2Matrix,
}

impl From<nilclean::Gf2Matrix> for PyGf2Matrix {
    fn from(inner: nilclean::Gf2Matrix) -> Self {
        PyGf2Matrix { inner }
    }
}

#[pymethods]
impl PyGf2Matrix {
    /// Builds a matrix from row strings such as `["0001", "1000", ...]`.
    #[new]
    fn new(rows: Vec<String>) -> PyResult<Self> {
        let rows: Vec<&str> = rows.iter().map(String::as_str).collect();
        nilclean::Gf2Matrix::from_row_strs(&rows).map(Into::into).map_err(value_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        nilclean::Gf2Matrix::parse_text(text).map(Into::into).map_err(value_err)
    }

    #[staticmethod]
    fn matrix_c() -> Self {
        nilclean::Gf2Matrix::matrix_c().into()
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        check_dim(n)?;
        Ok(nilclean::Gf2Matrix::identity(n).into())
    }

    #[staticmethod]
    fn zero(n: usize) -> PyResult<Self> {
        check_dim(n)?;
        Ok(nilclean::Gf2Matrix::zero(n).into())
    }

    #[staticmethod]
    fn companion(poly: &str) -> PyResult<Self> {
        nilclean::Gf2Matrix::companion(&parse_poly(poly)?).map(Into::into).map_err(value_err)
    }

    #[staticmethod]
    fn direct_sum(blocks: Vec<PyGf2Matrix>) -> PyResult<Self> {
        let blocks: Vec<_> = blocks.into_iter().map(|b| b.inner).collect();
        nilclean::Gf2Matrix::direct_sum(&blocks).map(Into::into).map_err(value_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rows(&self) -> Vec<String> {
        self.inner.to_text().lines().skip(1).map(str::to_string).collect()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<bool> {
        if i >= self.inner.dim() || j >= self.inner.dim() {
            return Err(value_err("index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __add__(&self, other: &PyGf2Matrix) -> PyResult<Self> {
        self.inner.add(&other.inner).map(Into::into).map_err(value_err)
    }

    fn __matmul__(&self, other: &PyGf2Matrix) -> PyResult<Self> {
        self.inner.mul(&other.inner).map(Into::into).map_err(value_err)
    }

    fn __pow__(&self, e: u64, _modulo: Option<Py<PyAny>>) -> Self {
        self.inner.pow(e).into()
    }

    fn trace(&self) -> bool {
        self.inner.trace()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn inverse(&self) -> PyResult<Self> {
        self.inner.inverse().map(Into::into).map_err(value_err)
    }

    fn conjugate_by(&self, s: &PyGf2Matrix) -> PyResult<Self> {
        nilclean::Gf2Matrix::conjugate(&s.inner, &self.inner).map(Into::into).map_err(value_err)
    }

    fn eval_poly(&self, poly: &str) -> PyResult<Self> {
        Ok(self.inner.eval_poly(&parse_poly(poly)?).into())
    }

    fn is_idempotent(&self) -> bool {
        self.inner.is_idempotent()
    }

    fn is_nilpotent(&self, k: u64) -> bool {
        self.inner.is_nilpotent_index(k)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Gf2Matrix({:?})", self.rows())
    }
}

fn check_dim(n: usize) -> PyResult<()> {
    if n > nilclean::matrix::MAX_DIM {
        return Err(value_err(format!("dimension {n} exceeds 64")));
    }
    Ok(())
}

/// Result of a decomposition search.
#[pyclass(name = "SearchReport", frozen, module = "pynilclean")]
pub struct PySearchReport {
    inner: nilclean::SearchReport,
}

#[pymethods]
impl PySearchReport {
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }

    #[getter]
    fn strategy(&self) -> &'static str {
        self.inner.strategy.as_str()
    }

    #[getter]
    fn space_size(&self) -> u64 {
        self.inner.space_size
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k
    }

    #[getter]
    fn target(&self) -> PyGf2Matrix {
        self.inner.target.clone().into()
    }

    #[getter]
    fn witness_p(&self) -> Option<PyGf2Matrix> {
        self.inner.witness.as_ref().map(|w| w.p.clone().into())
    }

    #[getter]
    fn witness_q(&self) -> Option<PyGf2Matrix> {
        self.inner.witness.as_ref().map(|w| w.q.clone().into())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "SearchReport(status={:?}, strategy={:?}, space_size={})",
            self.status(),
            self.strategy(),
            self.inner.space_size
        )
    }
}

/// Reduced word set of `(P+Q)^4 + (P+Q)^3` under `Q^index = 0`.
#[pyfunction]
#[pyo3(signature = (index = 3))]
fn derive_identity(index: usize) -> PyResult<Vec<String>> {
    let rules = nilclean::RuleSet::new(index).ok_or_else(|| value_err("index must be at least 1"))?;
    Ok(nilclean::derive_identity(&rules).words().map(ToString::to_string).collect())
}

#[pyfunction]
#[pyo3(signature = (a, k, strategy = "stratified", workers = None, sat_budget = None))]
fn decompose(
    py: Python<'_>,
    a: &PyGf2Matrix,
    k: u32,
    strategy: &str,
    workers: Option<usize>,
    sat_budget: Option<u64>,
) -> PyResult<PySearchReport> {
    let strategy = parse_strategy(strategy)?;
    let opts = SearchOptions { workers, sat_budget };
    let target = a.inner.clone();
    let inner = py.detach(|| nilclean::decompose(&target, k, strategy, &opts)).map_err(value_err)?;
    Ok(PySearchReport { inner })
}

/// Returns the report and, for `m >= 3`, the exported DIMACS text.
#[pyfunction]
fn theorem_check(py: Python<'_>, m: usize) -> PyResult<(PySearchReport, Option<String>)> {
    let outcome = py.detach(|| nilclean::theorem_check(m, &SearchOptions::default())).map_err(value_err)?;
    let dimacs = outcome.cnf.as_ref().map(nilclean::CnfInstance::to_dimacs);
    Ok((PySearchReport { inner: outcome.report }, dimacs))
}

#[pyfunction]
fn verify_certificate(json: &str) -> PyResult<PySearchReport> {
    nilclean::SearchReport::from_json(json).map(|inner| PySearchReport { inner }).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (n, strategy = "stratified"))]
fn idempotent_count(n: usize, strategy: &str) -> PyResult<usize> {
    Ok(nilclean::iter_idempotents(n, parse_strategy(strategy)?).map_err(value_err)?.count())
}

#[pyfunction]
fn idempotent_count_formula(n: usize) -> Option<u128> {
    nilclean::idempotent_count_formula(n)
}

#[pyfunction]
fn invariant_factors(a: &PyGf2Matrix) -> Vec<String> {
    nilclean::invariant_factors(&a.inner).iter().map(Gf2Poly::to_bit_string).collect()
}

#[pyfunction]
fn minimal_polynomial(a: &PyGf2Matrix) -> String {
    nilclean::minimal_polynomial(&a.inner).to_bit_string()
}

#[pyfunction]
fn frobenius_form(a: &PyGf2Matrix) -> PyGf2Matrix {
    nilclean::frobenius_form(&a.inner).into()
}

#[pyfunction]
fn is_similar(a: &PyGf2Matrix, b: &PyGf2Matrix) -> PyResult<bool> {
    nilclean::is_similar(&a.inner, &b.inner).map_err(value_err)
}

/// `(chain, representative)` for every similarity class of `M_n(F_2)`.
#[pyfunction]
fn similarity_classes(n: usize) -> Vec<(Vec<String>, PyGf2Matrix)> {
    nilclean::enumerate_similarity_classes(n)
        .into_iter()
        .map(|c| {
            let chain = c.invariant_factors.iter().map(Gf2Poly::to_bit_string).collect();
            (chain, c.representative.into())
        })
        .collect()
}

/// `(chain, status)` for every similarity class.
#[pyfunction]
#[pyo3(signature = (n, k, strategy = "stratified"))]
fn survey(py: Python<'_>, n: usize, k: u32, strategy: &str) -> PyResult<Vec<(String, String)>> {
    let strategy = parse_strategy(strategy)?;
    let rows = py.detach(|| nilclean::survey(n, k, strategy, &SearchOptions::default())).map_err(value_err)?;
    Ok(rows.iter().map(|r| (r.class.chain_string(), r.report.status.to_string())).collect())
}

#[pyfunction]
fn encode_dimacs(a: &PyGf2Matrix, k: u32) -> PyResult<String> {
    if k == 0 {
        return Err(value_err("k must be at least 1"));
    }
    Ok(nilclean::encode(&a.inner, k).to_dimacs())
}

/// Block identity check for `p = I_r (+) 0`: returns `(lhs, rhs, equal)`.
#[pyfunction]
fn block_identity_check(r: usize, q: &PyGf2Matrix) -> PyResult<(PyGf2Matrix, PyGf2Matrix, bool)> {
    let b = nilclean::block_identity_check(r, &q.inner).map_err(value_err)?;
    Ok((b.lhs.into(), b.rhs.into(), b.equal))
}

#[pymodule]
fn pynilclean(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", nilclean::VERSION)?;
    m.add_class::<PyGf2Matrix>()?;
    m.add_class::<PySearchReport>()?;
    m.add_function(wrap_pyfunction!(derive_identity, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(idempotent_count, m)?)?;
    m.add_function(wrap_pyfunction!(idempotent_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_factors, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(frobenius_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_similar, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_classes, m)?)?;
    m.add_function(wrap_pyfunction!(survey, m)?)?;
    m.add_function(wrap_pyfunction!(encode_dimacs, m)?)?;
    m.add_function(wrap_pyfunction!(block_identity_check, m)?)?;
    Ok(())
}
