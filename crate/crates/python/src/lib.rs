//! Python bindings: `import qsum`.
//!
//! Structured results (reports, plans, verification output) come back as
//! plain dicts and lists; exact probabilities come back as
//! `fractions.Fraction`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use qsum::analysis;
use qsum::register::Amplitudes;
use qsum::verify::{self, GridSpec};
use qsum::QsumError;

fn err(e: QsumError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.getattr("loads")?.call1((text,))
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    let (num, den): (&BigInt, &BigInt) = (r.numer(), r.denom());
    PyModule::import(py, "fractions")?
        .getattr("Fraction")?
        .call1((num.clone(), den.clone()))
}

/// A function `f: {0..n-1} -> Z_k` given by its value table.
#[pyclass(name = "FunctionTable", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunctionTable(qsum::FunctionTable);

#[pymethods]
impl PyFunctionTable {
    #[new]
    fn new(k: usize, values: Vec<usize>) -> PyResult<Self> {
        qsum::FunctionTable::new(k, values).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zero(n: usize, k: usize) -> PyResult<Self> {
        qsum::FunctionTable::zero(n, k).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn values(&self) -> Vec<usize> {
        self.0.values().to_vec()
    }

    /// `Σ f(x) mod k`.
    fn sum(&self) -> usize {
        self.0.sum()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("FunctionTable(k={}, values={:?})", self.0.k(), self.0.values())
    }
}

/// Runs the `n − r` query algorithm; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (table, r, seed=None))]
fn run_sum<'py>(
    py: Python<'py>,
    table: &PyFunctionTable,
    r: usize,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| qsum::run_sum(&table.0, r, seed)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn plan<'py>(py: Python<'py>, n: usize, k: usize, r: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &qsum::plan(n, k, r).map_err(err)?)
}

/// Final joint-register amplitudes of the core circuit, index `x·k + y`.
#[pyfunction]
fn run_core(table: &PyFunctionTable, r: usize) -> PyResult<Vec<Complex64>> {
    Ok(qsum::run_core(&table.0, r).map_err(err)?.amps().to_vec())
}

#[pyfunction]
fn success_probability<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    r: usize,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &qsum::success_probability(n, k, r).map_err(err)?)
}

#[pyfunction]
fn identify_probability<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    q: usize,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &qsum::vandam_identify_prob(n, k, q).map_err(err)?)
}

#[pyfunction]
fn identify_sum_bound<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    q: usize,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &qsum::vandam_sum_bound(n, k, q).map_err(err)?)
}

/// Rows `(q, block algorithm, identification, identification bound)` for
/// `q = 0..n`, all as fractions.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let (steps, smooth) = qsum::figure1_curves(n, k).map_err(err)?;
    (0..=n)
        .map(|q| {
            let pq = qsum::vandam_identify_prob(n, k, q).map_err(err)?;
            let row = (
                q,
                fraction(py, &steps.points[q].exact)?,
                fraction(py, &pq)?,
                fraction(py, &smooth.points[q].exact)?,
            );
            row.into_pyobject(py).map(|t| t.into_any())
        })
        .collect()
}

/// Closed-form probability of outcome `y` for the `s`-term state peaked at `a`.
#[pyfunction]
fn measurement_prob(k: usize, s: usize, a: usize, y: usize) -> PyResult<f64> {
    if k < 2 || s == 0 || s > k || a >= k || y >= k {
        return Err(PyValueError::new_err("need k >= 2, 1 <= s <= k, a < k, y < k"));
    }
    Ok(analysis::lemma3_prob(k, s, a, y))
}

#[pyfunction]
fn character_state(k: usize, s: usize, a: usize) -> PyResult<Vec<Complex64>> {
    Ok(qsum::a_state(k, s, a).map_err(err)?.amps().to_vec())
}

#[pyfunction]
fn central_mass(k: usize, s: usize) -> PyResult<f64> {
    qsum::central_mass(k, s).map_err(err)
}

/// Worst, best and mean success over every table of shape `(n, k)`.
#[pyfunction]
fn exhaustive_success<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    r: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let stats = py.detach(|| verify::exhaustive_success(n, k, r)).map_err(err)?;
    to_py(py, &stats)
}

/// Runs the verification suite; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (extended=false))]
fn verify_suite(py: Python<'_>, extended: bool) -> PyResult<Bound<'_, PyAny>> {
    let spec = if extended {
        GridSpec::extended()
    } else {
        GridSpec::default()
    };
    let report = py.detach(|| verify::check_suite(&spec)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "qsum")]
fn qsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunctionTable>()?;
    m.add_function(wrap_pyfunction!(run_sum, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(run_core, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(identify_probability, m)?)?;
    m.add_function(wrap_pyfunction!(identify_sum_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(measurement_prob, m)?)?;
    m.add_function(wrap_pyfunction!(character_state, m)?)?;
    m.add_function(wrap_pyfunction!(central_mass, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_success, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
