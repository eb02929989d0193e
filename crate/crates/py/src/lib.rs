//! Python bindings. Points cross the boundary as lists of `(x, y)` tuples;
//! structured reports come back as plain dicts.

use polydisc_core as core;
use polydisc_core::{constructions, diamgraph, geometry, kkt, optimize, Error, PointConfig};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::UnknownName(_) | Error::Singular(_) => PyValueError::new_err(e.to_string()),
        Error::Infeasible(_) | Error::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn to_dict<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Ordered planar point configuration.
#[pyclass(name = "Config", module = "polydisc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: PointConfig,
}

impl From<PointConfig> for PyConfig {
    fn from(inner: PointConfig) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyConfig {
    #[new]
    fn new(points: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(PointConfig::from_xy(&points).py()?.into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(core::io::ConfigFile::from_json(text).py()?.to_config().py()?.into())
    }

    fn to_json(&self) -> String {
        core::io::ConfigFile::from_config(&self.inner, Default::default()).to_json()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().iter().map(|p| (p.re, p.im)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Config(n={})", self.inner.len())
    }

    fn log_discriminant(&self) -> f64 {
        geometry::log_discriminant(&self.inner)
    }

    /// Δ, or None when it overflows f64.
    fn discriminant(&self) -> Option<f64> {
        geometry::discriminant(&self.inner).delta
    }

    #[pyo3(signature = (rescale = false))]
    fn delta_bar(&self, rescale: bool) -> PyResult<f64> {
        geometry::normalized_discriminant(&self.inner, rescale).py()
    }

    #[pyo3(signature = (rescale = false))]
    fn log_delta_bar(&self, rescale: bool) -> PyResult<f64> {
        geometry::log_normalized_discriminant(&self.inner, rescale).py()
    }

    fn diameter(&self) -> PyResult<f64> {
        geometry::diameter(&self.inner).py()
    }

    fn evaluate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &geometry::evaluate(&self.inner).py()?)
    }

    /// Copy rescaled to the given diameter.
    #[pyo3(signature = (diameter = 2.0))]
    fn normalized(&self, diameter: f64) -> PyResult<Self> {
        Ok(geometry::normalize_to_diameter(&self.inner, diameter).py()?.into())
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_convex(&self, tol: f64) -> PyResult<bool> {
        geometry::is_convex_position(&self.inner, tol).py()
    }

    /// Diameter-graph edges as 0-based pairs.
    #[pyo3(signature = (tol = 1e-9))]
    fn diameter_graph(&self, tol: f64) -> PyResult<Vec<(usize, usize)>> {
        Ok(diamgraph::extract(&self.inner, tol).py()?.edges().to_vec())
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn structure<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &diamgraph::maximizer_structure_report(&self.inner, tol).py()?)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn kkt<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &kkt::verify(&self.inner, tol).py()?)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn svg(&self, tol: f64) -> PyResult<String> {
        core::io::svg(&self.inner, tol).py()
    }
}

#[pyfunction]
fn kite4() -> PyConfig {
    constructions::kite4().into()
}

#[pyfunction]
fn hexagon6() -> PyConfig {
    constructions::hexagon6().into()
}

#[pyfunction]
fn regular_ngon(n: usize) -> PyResult<PyConfig> {
    Ok(constructions::regular_ngon(n).py()?.into())
}

#[pyfunction]
fn dodecagon12() -> PyConfig {
    constructions::dodecagon12().config.into()
}

/// Arc polygon on n = 6k points, scaled to diameter 2.
#[pyfunction]
fn arc_polygon(n: usize) -> PyResult<PyConfig> {
    if n == 0 || n % 6 != 0 {
        return Err(PyValueError::new_err(format!("arc polygon needs n divisible by 6, got {n}")));
    }
    Ok(constructions::arc_polygon(n / 6).py()?.p.into())
}

#[pyfunction]
fn sparse_arc(n: usize) -> PyResult<PyConfig> {
    Ok(constructions::sparse_arc(n).py()?.into())
}

#[pyfunction]
#[pyo3(signature = (n, m = 3, amplitude = None))]
fn triwave(n: usize, m: usize, amplitude: Option<f64>) -> PyResult<PyConfig> {
    Ok(constructions::triwave(n, m, amplitude).py()?.config.into())
}

/// Multi-start maximization. Returns `(config, summary)`; the summary omits
/// the configuration and traces.
#[pyfunction]
#[pyo3(signature = (n, starts = 32, seed = 0, max_iters = 5000, graph = None))]
fn maximize<'py>(
    py: Python<'py>,
    n: usize,
    starts: usize,
    seed: u64,
    max_iters: usize,
    graph: Option<&str>,
) -> PyResult<(PyConfig, Bound<'py, PyAny>)> {
    let opts = optimize::OptimizeOptions { seed, starts, max_iters, ..Default::default() };
    let result = py
        .detach(|| match graph {
            Some(text) => diamgraph::Graph::parse_text(text).and_then(|g| optimize::maximize_with_graph(n, &g, &opts)),
            None => optimize::maximize_free(n, &opts),
        })
        .py()?;
    let mut summary = serde_json::to_value(&result).map_err(|e| PyValueError::new_err(e.to_string()))?;
    if let Some(obj) = summary.as_object_mut() {
        for key in ["config", "traces", "objective_trace"] {
            obj.remove(key);
        }
    }
    Ok((result.config.into(), to_dict(py, &summary)?))
}

/// Closed form and independent route for a named asymptotic constant.
#[pyfunction]
fn constant<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let report = core::asymptotics::constant(name).py()?;
    let passed = report.passed();
    let dict = to_dict(py, &report)?;
    dict.set_item("passed", passed)?;
    Ok(dict)
}

#[pyfunction]
fn constant_names() -> Vec<&'static str> {
    core::asymptotics::CONSTANT_NAMES.to_vec()
}

/// `(enumerated, formula)` caterpillar counts; formula is None below n = 5.
#[pyfunction]
fn caterpillar_count(n: usize) -> PyResult<(usize, Option<u64>)> {
    let found = diamgraph::enumerate_caterpillars(n).py()?.len();
    Ok((found, diamgraph::caterpillar_count_formula(n)))
}

#[pymodule]
fn polydisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(kite4, m)?)?;
    m.add_function(wrap_pyfunction!(hexagon6, m)?)?;
    m.add_function(wrap_pyfunction!(regular_ngon, m)?)?;
    m.add_function(wrap_pyfunction!(dodecagon12, m)?)?;
    m.add_function(wrap_pyfunction!(arc_polygon, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_arc, m)?)?;
    m.add_function(wrap_pyfunction!(triwave, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(constant, m)?)?;
    m.add_function(wrap_pyfunction!(constant_names, m)?)?;
    m.add_function(wrap_pyfunction!(caterpillar_count, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
