//! Python bindings for `ptvir`.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::ptvir::cli::{self, parse_insertion, parse_surface_spec, VerifyOptions};
use ::ptvir::cohmodel::CohModel;
use ::ptvir::cubicpt::{self, cubic_model, FanoModel};
use ::ptvir::exact::Rational;
use ::ptvir::hilbsurf::{self, k3_spec, load_surface, plane_spec, SurfaceResidual};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format!("{}/{}", r.numer(), r.denom()),))
}

/// Partition function of an insertion on the cubic 3-fold, in the line class.
#[pyclass(frozen, module = "ptvir")]
struct PartitionFunction {
    #[pyo3(get)]
    series: String,
    #[pyo3(get)]
    closed_form: String,
    #[pyo3(get)]
    functional_equation: bool,
    #[pyo3(get)]
    ambiguous: bool,
}

#[pymethods]
impl PartitionFunction {
    fn __repr__(&self) -> String {
        format!("PartitionFunction({})", self.closed_form)
    }
}

/// `Σ_{n+1 ≤ max_order+1} q^{n+1} ⟨D⟩_{n+1}` and its rational closed form.
#[pyfunction]
#[pyo3(signature = (insertion, max_order = 10))]
fn partition(insertion: &str, max_order: u32) -> PyResult<PartitionFunction> {
    let d = parse_insertion(insertion, &cubic_model()).map_err(value_err)?;
    let z = cubicpt::partition_function(&d, max_order, &FanoModel::new()).map_err(runtime_err)?;
    Ok(PartitionFunction {
        series: z.series.to_string(),
        closed_form: z.closed_form.to_string(),
        functional_equation: z.satisfies_functional_equation(),
        ambiguous: z.ambiguous,
    })
}

/// `⟨D⟩_{n+1}` on the cubic, as a polynomial in the odd pairings `P(i,j)`.
#[pyfunction]
fn bracket(insertion: &str, n_plus_1: u32) -> PyResult<String> {
    let d = parse_insertion(insertion, &cubic_model()).map_err(value_err)?;
    cubicpt::bracket(n_plus_1, &d, &FanoModel::new()).map(|b| b.to_string()).map_err(runtime_err)
}

/// Series of `⟨L_k D⟩` on the cubic; zero when the constraint holds.
#[pyfunction]
#[pyo3(signature = (k, insertion, max_order = 10))]
fn virasoro_residual(k: i64, insertion: &str, max_order: u32) -> PyResult<String> {
    let d = parse_insertion(insertion, &cubic_model()).map_err(value_err)?;
    cubicpt::virasoro_residual_cubic(k, &d, max_order, &FanoModel::new())
        .map(|s| s.to_string())
        .map_err(runtime_err)
}

/// A surface with `H¹ = 0` and its Hilbert schemes of at most one point.
#[pyclass(frozen, module = "ptvir")]
struct Surface {
    model: Arc<CohModel>,
    residuals: SurfaceResidual,
}

impl Surface {
    fn from_spec(spec: &hilbsurf::SurfaceSpec) -> PyResult<Self> {
        let model = Arc::new(load_surface(spec).map_err(value_err)?);
        Ok(Surface { residuals: SurfaceResidual::new(model.clone()), model })
    }
}

#[pymethods]
impl Surface {
    /// Parses the `key = value` spec format read by `ptvir verify --spec`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Self::from_spec(&parse_surface_spec(text).map_err(value_err)?)
    }

    #[staticmethod]
    fn plane() -> PyResult<Self> {
        Self::from_spec(&plane_spec())
    }

    #[staticmethod]
    fn k3() -> PyResult<Self> {
        Self::from_spec(&k3_spec())
    }

    #[getter]
    fn name(&self) -> String {
        self.model.name().to_string()
    }

    /// Names of the basis classes, usable in insertions.
    fn basis(&self) -> Vec<String> {
        self.model.basis().iter().map(|b| b.name.clone()).collect()
    }

    /// `∫_{S^[n]} D` for `n ≤ 1`.
    fn bracket<'py>(&self, py: Python<'py>, insertion: &str, n: u32) -> PyResult<Bound<'py, PyAny>> {
        check_n(n)?;
        let d = parse_insertion(insertion, &self.model).map_err(value_err)?;
        fraction(py, &hilbsurf::bracket_hilb(n, &d, &self.model))
    }

    /// `∫_{S^[n]} L_k D` for `n ≤ 1`.
    fn virasoro_residual<'py>(&self, py: Python<'py>, k: i64, insertion: &str, n: u32) -> PyResult<Bound<'py, PyAny>> {
        check_n(n)?;
        let d = parse_insertion(insertion, &self.model).map_err(value_err)?;
        fraction(py, &self.residuals.residual(k, &d, n).map_err(runtime_err)?)
    }

    fn __repr__(&self) -> String {
        format!("Surface({})", self.model.name())
    }
}

fn check_n(n: u32) -> PyResult<()> {
    if n > 1 {
        return Err(PyValueError::new_err(format!("only n <= 1 is supported, got n = {n}")));
    }
    Ok(())
}

/// Result of a verification suite.
#[pyclass(frozen, module = "ptvir")]
struct SuiteReport {
    inner: cli::SuiteReport,
}

#[pymethods]
impl SuiteReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// `(id, anchor, expected, computed, status)` per check.
    #[getter]
    fn rows(&self) -> Vec<(String, String, String, String, String)> {
        self.inner
            .rows
            .iter()
            .map(|r| (r.id.clone(), r.anchor.clone(), r.expected.clone(), r.computed.clone(), r.status().to_string()))
            .collect()
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }

    fn __repr__(&self) -> String {
        format!("SuiteReport({}: {}/{})", self.inner.suite, self.inner.passed_count(), self.inner.rows.len())
    }
}

/// Runs one of the suites listed in `SUITES`.
#[pyfunction]
#[pyo3(signature = (suite, max_order = 10, specs = Vec::new(), fuzz = 50, seed = 1))]
fn verify(py: Python<'_>, suite: &str, max_order: u32, specs: Vec<PathBuf>, fuzz: usize, seed: u64) -> PyResult<SuiteReport> {
    let opts = VerifyOptions { max_order, specs, fuzz, seed };
    let inner = py.detach(|| cli::run_suite(suite, &opts)).map_err(value_err)?;
    Ok(SuiteReport { inner })
}

#[pymodule]
fn ptvir(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SUITES", cli::SUITES.to_vec())?;
    m.add_class::<PartitionFunction>()?;
    m.add_class::<Surface>()?;
    m.add_class::<SuiteReport>()?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(virasoro_residual, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
