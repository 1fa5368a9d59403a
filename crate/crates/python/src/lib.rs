//! Python bindings for `gridspline`.

use gridspline::rational::format_rational;
use gridspline::validation::{run_suite, SuiteOptions};
use gridspline::{
    alpha_closed_form, BetaFamily, Boundary, Error, GridField, GridSpline, HermiteSpline, KernelPath,
    RationalPolynomial, SplineKind, StencilTable,
};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn exact(p: &RationalPolynomial, len: usize) -> Vec<String> {
    (0..len.max(p.coeffs().len())).map(|k| format_rational(&p.coeff(k))).collect()
}

fn parse_boundary(name: &str) -> PyResult<Boundary> {
    match name {
        "periodic" => Ok(Boundary::Periodic),
        "strict" => Ok(Boundary::Strict),
        other => Err(PyValueError::new_err(format!(
            "unknown boundary {other:?}, expected 'periodic' or 'strict'"
        ))),
    }
}

/// An admissible `(n, q)` spline kind; `q=None` selects plain Hermite data.
#[pyclass(name = "SplineKind", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PySplineKind(SplineKind);

#[pymethods]
impl PySplineKind {
    #[new]
    #[pyo3(signature = (n, q=None))]
    fn new(n: usize, q: Option<usize>) -> PyResult<Self> {
        let kind = match q {
            Some(q) => SplineKind::grid(n, q),
            None => SplineKind::hermite(n),
        };
        kind.map(Self).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn q(&self) -> Option<usize> {
        self.0.q()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn g(&self) -> Option<usize> {
        self.0.g()
    }

    #[getter]
    fn reproduction_degree(&self) -> usize {
        self.0.reproduction_degree()
    }

    #[staticmethod]
    #[pyo3(signature = (max_n=19, max_q=12))]
    fn all(max_n: usize, max_q: usize) -> Vec<Self> {
        SplineKind::all_grid_kinds(max_n, max_q).into_iter().map(Self).collect()
    }

    fn __repr__(&self) -> String {
        match self.0.q() {
            Some(q) => format!("SplineKind(n={}, q={q})", self.0.n()),
            None => format!("SplineKind(n={})", self.0.n()),
        }
    }
}

/// The exact basis polynomials of one grid-spline kind.
#[pyclass(name = "BetaFamily", frozen)]
struct PyBetaFamily(BetaFamily);

#[pymethods]
impl PyBetaFamily {
    #[new]
    fn new(n: usize, q: usize) -> PyResult<Self> {
        SplineKind::grid(n, q)
            .and_then(BetaFamily::derive)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> PySplineKind {
        PySplineKind(self.0.kind())
    }

    /// Offsets `i` in `-g..=g+1`, matching the order of every returned list.
    fn offsets(&self) -> Vec<i64> {
        self.0.offsets().collect()
    }

    /// Ascending exact coefficients of `beta_i` as `"num/den"` strings.
    fn coefficients(&self, i: i64) -> Vec<String> {
        exact(&self.0.poly(i), self.0.n() + 1)
    }

    /// Values of all basis polynomials (or their `order`-th derivative) at `x`.
    #[pyo3(signature = (x, order=0))]
    fn eval(&self, x: f64, order: usize) -> PyResult<Vec<f64>> {
        self.0.eval(order, x).map_err(to_py)
    }

    /// Runs the exact checks; returns `(check name, passed)` pairs.
    fn validate(&self) -> Vec<(String, bool)> {
        self.0
            .validate()
            .checks
            .into_iter()
            .map(|c| (c.name, c.passed))
            .collect()
    }

    /// The export records as a JSON string.
    fn export_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.export_records()).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("BetaFamily{}", self.0.kind())
    }
}

/// Derivative-estimate weights on `-g..=g`; row `l` estimates the `l`-th derivative.
#[pyfunction]
fn stencil(g: usize) -> PyResult<Vec<Vec<String>>> {
    let table = StencilTable::derive(g).map_err(to_py)?;
    Ok((0..=table.max_order())
        .map(|l| table.row(l).iter().map(format_rational).collect())
        .collect())
}

/// Ascending exact coefficients of the Hermite basis polynomial for `node` in {0, 1}.
#[pyfunction]
fn alpha(n: usize, l: usize, node: usize) -> PyResult<Vec<String>> {
    let p = alpha_closed_form(n, l, node).map_err(to_py)?;
    Ok(exact(&p, n + 1))
}

/// Node values on a regular grid with row-major `data` (last axis fastest).
#[pyclass(name = "GridField", frozen)]
struct PyGridField(GridField);

#[pymethods]
impl PyGridField {
    #[new]
    #[pyo3(signature = (dims, h, data, boundary="periodic"))]
    fn new(dims: Vec<usize>, h: Vec<f64>, data: Vec<f64>, boundary: &str) -> PyResult<Self> {
        GridField::new(dims, h, data, parse_boundary(boundary)?)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        gridspline::io::read_field(path).map(Self).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        gridspline::io::write_field(path, &self.0).map_err(to_py)
    }

    #[getter]
    fn ndim(&self) -> usize {
        self.0.ndim()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.0.h().to_vec()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        match self.0.boundary() {
            Boundary::Periodic => "periodic",
            Boundary::Strict => "strict",
        }
    }

    fn value(&self, index: Vec<usize>) -> PyResult<f64> {
        if index.len() != self.0.ndim() || index.iter().zip(self.0.dims()).any(|(i, d)| i >= d) {
            return Err(PyValueError::new_err(format!("index {index:?} outside {:?}", self.0.dims())));
        }
        Ok(self.0.value(&index))
    }

    fn __repr__(&self) -> String {
        format!("GridField(dims={:?}, h={:?}, boundary='{}')", self.0.dims(), self.0.h(), self.boundary())
    }
}

/// Tensor-product grid-spline evaluator for one kind.
#[pyclass(name = "GridSpline", frozen)]
struct PyGridSpline(GridSpline);

#[pymethods]
impl PyGridSpline {
    #[new]
    fn new(n: usize, q: usize) -> PyResult<Self> {
        SplineKind::grid(n, q)
            .and_then(GridSpline::new)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> PySplineKind {
        PySplineKind(self.0.kind())
    }

    /// Interpolated value at a physical point.
    #[pyo3(signature = (field, point, generic=false))]
    fn evaluate(&self, field: &PyGridField, point: Vec<f64>, generic: bool) -> PyResult<f64> {
        let path = if generic { KernelPath::Generic } else { KernelPath::Auto };
        self.0.evaluate_with(&field.0, &point, path).map_err(to_py)
    }

    /// Values at many points, one point per row.
    fn evaluate_many(&self, py: Python<'_>, field: &PyGridField, points: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        py.detach(|| points.iter().map(|p| self.0.evaluate(&field.0, p)).collect::<Result<_, _>>())
            .map_err(to_py)
    }

    /// Mixed partial derivative with per-axis `orders`, in physical units.
    fn evaluate_derivative(&self, field: &PyGridField, point: Vec<f64>, orders: Vec<usize>) -> PyResult<f64> {
        self.0.evaluate_derivative(&field.0, &point, &orders).map_err(to_py)
    }

    /// Splits the value by node index along `axis`: nodes below `index`, then the rest.
    fn partitioned_evaluate(
        &self,
        field: &PyGridField,
        point: Vec<f64>,
        axis: usize,
        index: i64,
    ) -> PyResult<(f64, f64)> {
        self.0
            .partitioned_evaluate(&field.0, &point, axis, index)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GridSpline{}", self.0.kind())
    }
}

/// Hermite interpolation on the unit cell.
///
/// `provider(corner, orders)` returns the mixed derivative with per-axis `orders`
/// at the cell corner whose coordinates are 0 or 1.
#[pyfunction]
fn evaluate_hermite(py: Python<'_>, provider: Bound<'_, PyAny>, point: Vec<f64>, n: usize) -> PyResult<f64> {
    let spline = HermiteSpline::new(n).map_err(to_py)?;
    if point.is_empty() || point.iter().any(|x| !x.is_finite()) {
        return Err(PyValueError::new_err("point must be a non-empty list of finite numbers"));
    }
    let mut failure: Option<PyErr> = None;
    let value = spline.evaluate(
        |corner, orders| {
            if failure.is_some() {
                return 0.0;
            }
            let result = (|| {
                let args = (PyTuple::new(py, corner)?, PyTuple::new(py, orders)?);
                provider.call1(args)?.extract::<f64>()
            })();
            result.unwrap_or_else(|e| {
                failure = Some(e);
                0.0
            })
        },
        &point,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `(kind, check, detail)` for each failed check.
type Failure = (String, String, String);

/// Runs the exact validation suite; returns the check count and the failures.
#[pyfunction]
#[pyo3(signature = (max_n=19, max_q=12))]
fn validate_all(py: Python<'_>, max_n: usize, max_q: usize) -> PyResult<(usize, Vec<Failure>)> {
    let report = py
        .detach(|| run_suite(max_n, max_q, &SuiteOptions::default()))
        .map_err(to_py)?;
    let failures = report
        .failures()
        .map(|(kind, c)| (kind.to_string(), c.name.clone(), c.detail.clone()))
        .collect();
    Ok((report.check_count(), failures))
}

#[pymodule]
fn pygridspline(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySplineKind>()?;
    m.add_class::<PyBetaFamily>()?;
    m.add_class::<PyGridField>()?;
    m.add_class::<PyGridSpline>()?;
    m.add_function(wrap_pyfunction!(stencil, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_hermite, m)?)?;
    m.add_function(wrap_pyfunction!(validate_all, m)?)?;
    Ok(())
}
