//! Python bindings for the `elsis` screening toolkit.
//!
//! Matrices cross the boundary as lists of rows; reports are also available as the
//! JSON the command-line tool writes.

use elsis::bench::{render_table, run_replications, BenchmarkTable, Pipeline, TableFormat};
use elsis::el::{el_ratio_at_mean as el_mean, solve_lambda_multi as el_multi, solve_lambda_uni as el_uni};
use elsis::iterative::{el_isis as isis, IsisConfig, IsisReport};
use elsis::screening::{screen as screen_impl, Family, Method, ScreeningReport, SelectionRule};
use elsis::simgen::{generate, ErrorDist, Example, SimData, SimulationSpec};
use elsis::{Dataset, ElConfig, ElSolution, Error};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::DegenerateInput(_)
        | Error::DomainViolation { .. }
        | Error::InvalidCovariance(_)
        | Error::Separation(_)
        | Error::NonConvergence(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let r = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != r) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    Ok(DMatrix::from_fn(n, r, |i, k| rows[i][k]))
}

fn method(name: &str) -> PyResult<Method> {
    match name.to_ascii_lowercase().as_str() {
        "el" => Ok(Method::El),
        "ls" => Ok(Method::Ls),
        "rrc" => Ok(Method::Rrc),
        "glm" => Ok(Method::Glm),
        _ => Err(PyValueError::new_err(format!("unknown method {name:?} (el, ls, rrc, glm)"))),
    }
}

fn family(name: &str) -> PyResult<Family> {
    match name.to_ascii_lowercase().as_str() {
        "gaussian" => Ok(Family::Gaussian),
        "binomial" => Ok(Family::Binomial),
        _ => Err(PyValueError::new_err(format!("unknown family {name:?} (gaussian, binomial)"))),
    }
}

fn error_dist(name: &str) -> PyResult<ErrorDist> {
    if name.eq_ignore_ascii_case("t4") {
        return Ok(ErrorDist::T4);
    }
    let sd = match name.split_once(':') {
        Some((k, sd)) if k.eq_ignore_ascii_case("normal") => sd.parse::<f64>().ok(),
        None if name.eq_ignore_ascii_case("normal") => Some(1.0),
        _ => None,
    };
    sd.map(|sd| ErrorDist::Normal { sd })
        .ok_or_else(|| PyValueError::new_err(format!("expected normal:SD or t4, got {name:?}")))
}

/// Result of an EL dual solve.
#[pyclass(name = "ElSolution", module = "pyelsis", frozen)]
pub struct PyElSolution {
    inner: ElSolution,
}

#[pymethods]
impl PyElSolution {
    #[getter]
    fn lambda_(&self) -> Vec<f64> {
        self.inner.lambda.clone()
    }
    /// `-2 log` EL ratio; `inf` when zero is outside the convex hull.
    #[getter]
    fn log_ratio(&self) -> f64 {
        self.inner.log_ratio.to_f64()
    }
    #[getter]
    fn status(&self) -> String {
        format!("{:?}", self.inner.status)
    }
    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }
    #[getter]
    fn dual_residual(&self) -> f64 {
        self.inner.dual_residual
    }
    fn __repr__(&self) -> String {
        format!("ElSolution(log_ratio={}, status={:?})", self.inner.log_ratio, self.inner.status)
    }
}

/// Covariates (list of rows), response and feature names.
#[pyclass(name = "Dataset", module = "pyelsis", frozen)]
pub struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (x, y, feature_names=None))]
    fn new(x: Vec<Vec<f64>>, y: Vec<f64>, feature_names: Option<Vec<String>>) -> PyResult<Self> {
        let xm = matrix(&x)?;
        let y = DVector::from_vec(y);
        let inner = match feature_names {
            Some(names) => Dataset::new(xm, y, names),
            None => Dataset::unnamed(xm, y),
        }
        .map_err(py_err)?;
        Ok(PyDataset { inner })
    }
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }
    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }
    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }
    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y.as_slice().to_vec()
    }
    #[getter]
    fn standardized(&self) -> bool {
        self.inner.standardized
    }
    /// Rows of the covariate matrix.
    fn x_rows(&self) -> Vec<Vec<f64>> {
        self.inner.x.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
    fn standardize(&self) -> PyResult<PyDataset> {
        Ok(PyDataset { inner: self.inner.standardize().map_err(py_err)? })
    }
    fn __repr__(&self) -> String {
        format!("Dataset(n={}, p={})", self.inner.n(), self.inner.p())
    }
}

#[pyclass(name = "ScreeningReport", module = "pyelsis", frozen)]
pub struct PyScreeningReport {
    inner: ScreeningReport,
    names: Vec<String>,
}

#[pymethods]
impl PyScreeningReport {
    /// Selected feature indices, best first.
    #[getter]
    fn selected(&self) -> Vec<usize> {
        self.inner.selected.clone()
    }
    #[getter]
    fn selected_names(&self) -> Vec<String> {
        self.inner.selected.iter().map(|&j| self.names[j].clone()).collect()
    }
    /// Per-feature statistic (`None` if undefined), in feature order.
    #[getter]
    fn statistics(&self) -> Vec<Option<f64>> {
        self.inner.stats.iter().map(|s| s.statistic.map(|v| v.to_f64())).collect()
    }
    #[getter]
    fn ranks(&self) -> Vec<usize> {
        self.inner.stats.iter().map(|s| s.rank).collect()
    }
    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }
}

#[pyclass(name = "IsisReport", module = "pyelsis", frozen)]
pub struct PyIsisReport {
    inner: IsisReport,
    names: Vec<String>,
}

#[pymethods]
impl PyIsisReport {
    #[getter]
    fn selected(&self) -> Vec<usize> {
        self.inner.screening.selected.clone()
    }
    #[getter]
    fn selected_names(&self) -> Vec<String> {
        self.inner.screening.selected.iter().map(|&j| self.names[j].clone()).collect()
    }
    /// Active set after each iteration.
    #[getter]
    fn active_sets(&self) -> Vec<Vec<usize>> {
        self.inner.trace.iter().map(|s| s.active.clone()).collect()
    }
    #[getter]
    fn stop_reason(&self) -> String {
        format!("{:?}", self.inner.stop_reason)
    }
    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }
}

#[pyclass(name = "BenchmarkTable", module = "pyelsis", frozen)]
pub struct PyBenchmarkTable {
    inner: BenchmarkTable,
}

#[pymethods]
impl PyBenchmarkTable {
    #[getter]
    fn method(&self) -> String {
        self.inner.method.clone()
    }
    /// `(feature name, count)` for each true feature.
    #[getter]
    fn counts(&self) -> Vec<(String, usize)> {
        self.inner.per_true_feature_counts.iter().map(|c| (c.feature.clone(), c.count)).collect()
    }
    #[getter]
    fn unimportant_avg(&self) -> f64 {
        self.inner.unimportant_avg
    }
    #[getter]
    fn failures(&self) -> usize {
        self.inner.failures
    }
    #[getter]
    fn reps(&self) -> usize {
        self.inner.r
    }
    fn to_json(&self) -> String {
        render_table(std::slice::from_ref(&self.inner), TableFormat::Json)
    }
}

#[pymodule]
mod pyelsis {
    use super::*;

    #[pymodule_export]
    use super::{PyBenchmarkTable, PyDataset, PyElSolution, PyIsisReport, PyScreeningReport};

    /// Univariate EL dual for the values `g`.
    #[pyfunction]
    fn solve_lambda_uni(g: Vec<f64>) -> PyResult<PyElSolution> {
        Ok(PyElSolution { inner: el_uni(&g, &ElConfig::default()).map_err(py_err)? })
    }

    /// EL ratio of `values` at mean `mu`.
    #[pyfunction]
    fn el_ratio_at_mean(values: Vec<f64>, mu: f64) -> PyResult<PyElSolution> {
        Ok(PyElSolution { inner: el_mean(&values, mu, &ElConfig::default()).map_err(py_err)? })
    }

    /// Multivariate EL dual; `rows` is the n x r estimating-function matrix.
    #[pyfunction]
    fn solve_lambda_multi(rows: Vec<Vec<f64>>) -> PyResult<PyElSolution> {
        Ok(PyElSolution { inner: el_multi(&matrix(&rows)?, &ElConfig::default()).map_err(py_err)? })
    }

    /// Standardizes `data` and screens it. Defaults to the top `floor(n/(2 ln n))`.
    #[pyfunction]
    #[pyo3(signature = (data, method="el", top_d=None, threshold=None, family="gaussian"))]
    fn screen(
        data: &PyDataset,
        method: &str,
        top_d: Option<usize>,
        threshold: Option<f64>,
        family: &str,
    ) -> PyResult<PyScreeningReport> {
        let d = data.inner.standardize().map_err(py_err)?;
        let rule = match (top_d, threshold) {
            (Some(_), Some(_)) => return Err(PyValueError::new_err("give top_d or threshold, not both")),
            (_, Some(g)) => SelectionRule::Threshold(g),
            (Some(k), None) => SelectionRule::TopD(k),
            (None, None) => SelectionRule::TopD(elsis::screening::default_top_d(d.n()).min(d.p())),
        };
        let inner = screen_impl(&d, super::method(method)?, rule, super::family(family)?, &ElConfig::default())
            .map_err(py_err)?;
        Ok(PyScreeningReport { inner, names: d.feature_names })
    }

    /// Iterative EL screening with SCAD pruning.
    #[pyfunction]
    #[pyo3(signature = (data, family="gaussian", per_step_recruit=None, max_active=None, max_iterations=5))]
    fn el_isis(
        data: &PyDataset,
        family: &str,
        per_step_recruit: Option<usize>,
        max_active: Option<usize>,
        max_iterations: usize,
    ) -> PyResult<PyIsisReport> {
        let d = data.inner.standardize().map_err(py_err)?;
        let config = IsisConfig {
            per_step_recruit,
            max_active,
            max_iterations,
            family: super::family(family)?,
            ..IsisConfig::default()
        };
        let inner = isis(&d, &config).map_err(py_err)?;
        Ok(PyIsisReport { inner, names: d.feature_names })
    }

    fn spec(example: u32, n: usize, p: usize, seed: u64, c: f64, error: &str) -> PyResult<SimulationSpec> {
        let ex = Example::from_number(example).map_err(py_err)?;
        Ok(SimulationSpec { c, error_dist: error_dist(error)?, ..SimulationSpec::new(ex, n, p, seed) })
    }

    /// One replication of a cross-sectional design (examples 1, 2, 3, 5).
    #[pyfunction]
    #[pyo3(signature = (example, n, p, seed, c=1.0, error="normal:1", replication=1))]
    fn simulate(example: u32, n: usize, p: usize, seed: u64, c: f64, error: &str, replication: u64) -> PyResult<PyDataset> {
        match generate(&spec(example, n, p, seed, c, error)?, replication).map_err(py_err)? {
            SimData::CrossSection(inner) => Ok(PyDataset { inner }),
            SimData::Longitudinal(_) => Err(PyValueError::new_err("example 4 is longitudinal; use the CLI")),
        }
    }

    /// Selection counts over replications `1..=reps`.
    #[pyfunction]
    #[pyo3(signature = (example, n, p, seed, reps, method="el", top_d=None, c=1.0, error="normal:1", iterative=false))]
    #[allow(clippy::too_many_arguments)]
    fn benchmark(
        py: Python<'_>,
        example: u32,
        n: usize,
        p: usize,
        seed: u64,
        reps: usize,
        method: &str,
        top_d: Option<usize>,
        c: f64,
        error: &str,
        iterative: bool,
    ) -> PyResult<PyBenchmarkTable> {
        let s = spec(example, n, p, seed, c, error)?;
        let base = if iterative {
            Pipeline::isis(IsisConfig { per_step_recruit: top_d, ..IsisConfig::default() })
        } else {
            Pipeline::sis(super::method(method)?)
        };
        let pipeline = Pipeline { rule: top_d.map(SelectionRule::TopD), ..base };
        let inner = py.detach(|| run_replications(&s, &pipeline, reps)).map_err(py_err)?;
        Ok(PyBenchmarkTable { inner })
    }
}
