//! Python bindings for the `wgreedy` core.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wgreedy::report::render;
use wgreedy::{CoefficientVector, IndexSet, OutputFormat, SigmaMode, TiePolicy};

fn err(e: wgreedy::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(x: Vec<f64>) -> PyResult<CoefficientVector> {
    CoefficientVector::new(x).map_err(err)
}

#[pyclass(frozen, module = "pywgreedy")]
struct Space(wgreedy::NormedSpace);

#[pymethods]
impl Space {
    #[staticmethod]
    fn lp(p: f64, dim: usize) -> PyResult<Self> {
        wgreedy::NormedSpace::lp(p, dim).map(Space).map_err(err)
    }

    #[staticmethod]
    fn sup(dim: usize) -> PyResult<Self> {
        wgreedy::NormedSpace::sup(dim).map(Space).map_err(err)
    }

    #[staticmethod]
    fn mixed(weight: &Weight, dim: usize) -> PyResult<Self> {
        wgreedy::NormedSpace::remark_mixed(&weight.0, dim).map(Space).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    fn norm(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.norm(&vector(x)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.0.label())
    }
}

#[pyclass(frozen, module = "pywgreedy")]
struct Weight(wgreedy::Weight);

#[pymethods]
impl Weight {
    #[new]
    fn new(entries: Vec<f64>) -> PyResult<Self> {
        wgreedy::Weight::new(entries).map(Weight).map_err(err)
    }

    #[staticmethod]
    fn constant(len: usize) -> Self {
        Weight(wgreedy::Weight::constant(len))
    }

    #[staticmethod]
    fn harmonic(len: usize) -> Self {
        Weight(wgreedy::Weight::harmonic(len))
    }

    #[staticmethod]
    fn geometric(first: f64, ratio: f64, len: usize) -> PyResult<Self> {
        wgreedy::Weight::geometric(first, ratio, len).map(Weight).map_err(err)
    }

    #[getter]
    fn entries(&self) -> Vec<f64> {
        self.0.entries().to_vec()
    }

    /// `w(A)` for a set of 1-based indices.
    fn measure(&self, indices: Vec<usize>) -> PyResult<f64> {
        let set = IndexSet::new(indices).map_err(err)?;
        wgreedy::w_measure(&self.0, &set).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Weight({})", self.0.label())
    }
}

/// Greedy permutations of `x` (1-based). With `all_ties`, every admissible one.
#[pyfunction]
#[pyo3(signature = (x, all_ties = false, tie_tol = 0.0, cap = 4096))]
fn greedy_orderings(x: Vec<f64>, all_ties: bool, tie_tol: f64, cap: usize) -> PyResult<Vec<Vec<usize>>> {
    let policy = if all_ties { TiePolicy::All } else { TiePolicy::LowestIndex };
    let orderings = wgreedy::greedy_ordering(&vector(x)?, &policy, tie_tol, cap).map_err(err)?;
    Ok(orderings.into_iter().map(|o| o.permutation).collect())
}

/// `G_m(x)` with ties broken by lowest index.
#[pyfunction]
fn greedy_sum(x: Vec<f64>, m: usize) -> PyResult<Vec<f64>> {
    let x = vector(x)?;
    let orderings = wgreedy::greedy_ordering(&x, &TiePolicy::LowestIndex, 0.0, 1).map_err(err)?;
    let g = wgreedy::greedy_sum(&x, &orderings[0], m).map_err(err)?;
    Ok(g.as_slice().to_vec())
}

/// Returns `(value, optimal_set)`.
#[pyfunction]
#[pyo3(signature = (space, x, weight, budget, mode = "best"))]
fn sigma(space: &Space, x: Vec<f64>, weight: &Weight, budget: f64, mode: &str) -> PyResult<(f64, Vec<usize>)> {
    let mode = match mode {
        "best" => SigmaMode::Best,
        "expansional" => SigmaMode::Expansional,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let r = wgreedy::sigma_w(&space.0, &vector(x)?, &weight.0, budget, mode).map_err(err)?;
    Ok((r.value, r.optimal_set.indices().to_vec()))
}

/// Runs a JSON run configuration and returns the report as JSON or CSV text.
#[pyfunction]
#[pyo3(signature = (config, format = "json"))]
fn run_config(py: Python<'_>, config: &str, format: &str) -> PyResult<String> {
    let format = match format {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(PyValueError::new_err(format!("unknown format {other:?}"))),
    };
    let cfg = wgreedy::parse_config(config).map_err(err)?;
    py.detach(|| wgreedy::run(&cfg).and_then(|r| render(&r, format))).map_err(err)
}

#[pymodule]
fn pywgreedy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", wgreedy::VERSION)?;
    m.add_class::<Space>()?;
    m.add_class::<Weight>()?;
    m.add_function(wrap_pyfunction!(greedy_orderings, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_sum, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
