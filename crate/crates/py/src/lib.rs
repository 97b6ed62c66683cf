//! Python module `partial_theta`.
//!
//! Exact series come back as Python `int` lists; reports come back as plain
//! dicts mirroring the JSON written by the command-line tool.

use num_bigint::BigInt;
use num_complex::Complex64;
use partial_theta::numeric::{self, Precision, ZeroFindParams};
use partial_theta::rk::{self, RkMethod};
use partial_theta::series::{self, IntSeries};
use partial_theta::{analysis, verify, zeros, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(partial_theta, ConvergenceError, PyArithmeticError);
create_exception!(partial_theta, StructuralError, PyArithmeticError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::NoConvergence(_) | Error::SingularDerivative(_) => ConvergenceError::new_err(msg),
        Error::Structural(_) => StructuralError::new_err(msg),
        Error::NonInvertible(_) => PyZeroDivisionError::new_err(msg),
        Error::InvalidArgument(_) | Error::InsufficientOrder(_) | Error::Domain(_) => {
            PyValueError::new_err(msg)
        }
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for partial_theta::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Converts a JSON tree into Python objects; integers of any size stay exact.
fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            let text = n.to_string();
            match text.parse::<BigInt>() {
                Ok(i) => i.into_pyobject(py)?.into_any().unbind(),
                Err(_) => {
                    let f: f64 = text
                        .parse()
                        .map_err(|_| PyValueError::new_err(format!("bad number {text}")))?;
                    f.into_pyobject(py)?.into_any().unbind()
                }
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn parse_precision(s: &str) -> PyResult<Precision> {
    match s {
        "auto" => Ok(Precision::Auto),
        "double" => Ok(Precision::Double),
        bits => bits.parse().map(Precision::Bits).map_err(|_| {
            PyValueError::new_err(format!(
                "precision must be 'auto', 'double' or a bit count, got {s:?}"
            ))
        }),
    }
}

fn parse_method(s: &str) -> PyResult<RkMethod> {
    match s {
        "recurrence" => Ok(RkMethod::Recurrence),
        "euler-cube" => Ok(RkMethod::EulerCube),
        "triple-product" | "triple-product-inverse" => Ok(RkMethod::TripleProductInverse),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

/// Truncated power series with exact integer coefficients.
#[pyclass(
    name = "Series",
    module = "partial_theta",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
struct PySeries {
    inner: IntSeries,
}

#[pymethods]
impl PySeries {
    #[new]
    fn new(coeffs: Vec<BigInt>) -> PyResult<Self> {
        IntSeries::new(coeffs).or_py().map(|inner| Self { inner })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn coeffs(&self) -> Vec<BigInt> {
        self.inner.coeffs().to_vec()
    }

    fn __getitem__(&self, k: usize) -> PyResult<BigInt> {
        self.inner.coeff(k).cloned().ok_or_else(|| {
            pyo3::exceptions::PyIndexError::new_err(format!("q^{k} is beyond the order"))
        })
    }

    fn __len__(&self) -> usize {
        self.inner.order() + 1
    }

    fn __add__(&self, o: &Self) -> Self {
        Self {
            inner: &self.inner + &o.inner,
        }
    }

    fn __sub__(&self, o: &Self) -> Self {
        Self {
            inner: &self.inner - &o.inner,
        }
    }

    fn __mul__(&self, o: &Self) -> Self {
        Self {
            inner: &self.inner * &o.inner,
        }
    }

    fn __neg__(&self) -> Self {
        Self {
            inner: -&self.inner,
        }
    }

    fn __pow__(&self, n: u32, _modulo: Option<Py<PyAny>>) -> Self {
        Self {
            inner: self.inner.pow(n),
        }
    }

    fn inverse(&self) -> PyResult<Self> {
        self.inner.inverse().or_py().map(|inner| Self { inner })
    }

    fn truncate(&self, order: usize) -> PyResult<Self> {
        self.inner
            .truncate(order)
            .or_py()
            .map(|inner| Self { inner })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Series({})", self.inner)
    }
}

/// Expansion `-q^-j + sign * q^kappa * sum_k g[k] q^k` of the `j`-th zero.
#[pyclass(name = "ZeroExpansion", module = "partial_theta", frozen)]
struct PyZeroExpansion {
    inner: zeros::ZeroExpansion,
}

#[pymethods]
impl PyZeroExpansion {
    #[getter]
    fn j(&self) -> u32 {
        self.inner.j
    }

    #[getter]
    fn kappa(&self) -> i64 {
        self.inner.kappa
    }

    #[getter]
    fn sign(&self) -> i32 {
        self.inner.sign
    }

    #[getter]
    fn g(&self) -> Vec<BigInt> {
        self.inner.g.clone()
    }

    /// `(exponent, coefficient)` pairs of the full Laurent series.
    fn terms(&self) -> Vec<(i64, BigInt)> {
        zeros::expansion_to_laurent(&self.inner)
            .terms()
            .filter(|(_, c)| *c != &BigInt::from(0))
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    fn __str__(&self) -> String {
        zeros::expansion_to_laurent(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "ZeroExpansion(j={}, sign={}, kappa={}, g={:?})",
            self.inner.j,
            self.inner.sign,
            self.inner.kappa,
            self.inner
                .g
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        )
    }
}

/// `(q; q)_inf` through `q^order`.
#[pyfunction]
fn euler_product(order: usize) -> PySeries {
    PySeries {
        inner: series::euler_product(order),
    }
}

/// `sum_j (-1)^j (2j+1) q^(j(j+1)/2)` through `q^order`.
#[pyfunction]
fn triple_product_series(order: usize) -> PySeries {
    PySeries {
        inner: rk::triple_product_series(order),
    }
}

/// `r_0..=r_n`, the coefficients of `1/(q; q)_inf^3`.
#[pyfunction]
#[pyo3(signature = (n, method = "recurrence"))]
fn rk_values(n: usize, method: &str) -> PyResult<Vec<BigInt>> {
    Ok(rk::RkTable::compute(n, parse_method(method)?).values)
}

/// Runs every method; returns `{"agree": bool, method: values, ...}`.
#[pyfunction]
fn cross_validate(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    let cv = py.detach(|| rk::cross_validate(n));
    let dict = PyDict::new(py);
    dict.set_item("agree", cv.agree())?;
    for t in &cv.tables {
        dict.set_item(t.method.name(), t.values.clone())?;
    }
    Ok(dict.into_any().unbind())
}

#[pyfunction]
fn difference_monotonicity(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    if n < 3 {
        return Err(PyValueError::new_err("n must be >= 3"));
    }
    let rep = py.detach(|| rk::difference_monotonicity(n));
    let out = report(py, &rep)?;
    out.bind(py).set_item("all_pass", rep.all_pass())?;
    Ok(out)
}

/// Solves `g_0..g_(n_coeffs-1)` for the `j`-th zero.
#[pyfunction]
fn solve_expansion(j: u32, n_coeffs: usize) -> PyResult<PyZeroExpansion> {
    zeros::solve_expansion(j, n_coeffs)
        .or_py()
        .map(|inner| PyZeroExpansion { inner })
}

/// `(Delta_j, Phi_j)` coefficient lists, `Delta_j` through `q^order`.
#[pyfunction]
fn delta_series(j: u32, order: usize) -> PyResult<(Vec<BigInt>, Vec<BigInt>)> {
    let d = zeros::delta_series(j, order).or_py()?;
    Ok((d.delta.coeffs().to_vec(), d.phi.coeffs().to_vec()))
}

#[pyfunction]
fn stabilization_report(py: Python<'_>, j_max: u32, depth: usize) -> PyResult<Py<PyAny>> {
    let rep = zeros::stabilization_report(j_max, depth).or_py()?;
    let out = report(py, &rep)?;
    out.bind(py).set_item("all_match", rep.all_match())?;
    Ok(out)
}

fn eval_dict(py: Python<'_>, r: numeric::EvalResult) -> PyResult<Py<PyAny>> {
    let dict = PyDict::new(py);
    dict.set_item("value", r.value)?;
    dict.set_item("tail_bound", r.tail_bound)?;
    dict.set_item("rounding_bound", r.rounding_bound)?;
    dict.set_item("terms_used", r.terms_used)?;
    dict.set_item("precision_bits", r.precision_bits)?;
    Ok(dict.into_any().unbind())
}

/// `theta(q, x)` with a truncation bound no larger than `eps`.
#[pyfunction]
#[pyo3(signature = (q, x, eps = 1e-15, precision = "auto"))]
fn theta_eval(
    py: Python<'_>,
    q: Complex64,
    x: Complex64,
    eps: f64,
    precision: &str,
) -> PyResult<Py<PyAny>> {
    let p = parse_precision(precision)?;
    let r = numeric::theta_eval(q, x, eps, p).or_py()?;
    eval_dict(py, r)
}

#[pyfunction]
#[pyo3(signature = (q, x, eps = 1e-15, precision = "auto"))]
fn theta_dx(
    py: Python<'_>,
    q: Complex64,
    x: Complex64,
    eps: f64,
    precision: &str,
) -> PyResult<Py<PyAny>> {
    let p = parse_precision(precision)?;
    let r = numeric::theta_dx(q, x, eps, p).or_py()?;
    eval_dict(py, r)
}

/// Newton refinement of the `j`-th zero from its truncated expansion.
#[pyfunction]
#[pyo3(signature = (q, j, seed_order = 12, tol = 1e-10, precision = "auto"))]
fn find_zero(
    py: Python<'_>,
    q: Complex64,
    j: u32,
    seed_order: usize,
    tol: f64,
    precision: &str,
) -> PyResult<Py<PyAny>> {
    let mut params = ZeroFindParams::new(q, j, seed_order, tol);
    params.precision = parse_precision(precision)?;
    let rep = py.detach(|| numeric::find_zero(&params)).or_py()?;
    let out = report(py, &rep)?;
    let dict = out.bind(py);
    dict.set_item("found", rep.found)?;
    dict.set_item("predicted", rep.predicted)?;
    dict.set_item("q", rep.q)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (q, j, orders, tol = 1e-10))]
fn convergence_sweep(
    py: Python<'_>,
    q: Complex64,
    j: u32,
    orders: Vec<usize>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let t = py
        .detach(|| numeric::convergence_sweep(q, j, &orders, tol))
        .or_py()?;
    let out = report(py, &t)?;
    out.bind(py)
        .set_item("strictly_decreasing", t.strictly_decreasing())?;
    Ok(out)
}

#[pyfunction]
fn s_value(s: u32, q: f64) -> PyResult<f64> {
    analysis::s_value(s, q).or_py()
}

#[pyfunction]
fn t_value(s: u32, q: f64) -> PyResult<f64> {
    analysis::t_value(s, q).or_py()
}

/// `M''(q)` for `M = (q; q)_inf^3`; the sparse-series order is chosen
/// automatically unless given.
#[pyfunction]
#[pyo3(signature = (q, order = None))]
fn m_second_derivative(q: f64, order: Option<u64>) -> PyResult<f64> {
    match order {
        Some(o) => analysis::m_second_derivative(q, o),
        None => analysis::m_second_derivative_auto(q),
    }
    .or_py()
}

/// Convexity inequalities on a grid in (0, 1). Defaults to 0.01..0.99.
#[pyfunction]
#[pyo3(signature = (q_grid = None, s_max = 200))]
fn convexity(py: Python<'_>, q_grid: Option<Vec<f64>>, s_max: u32) -> PyResult<Py<PyAny>> {
    let grid = q_grid.unwrap_or_else(analysis::default_grid);
    let rep = py
        .detach(|| analysis::verify_s_gt_t(&grid, s_max))
        .or_py()?;
    report(py, &rep)
}

#[pyfunction]
fn profile(py: Python<'_>, q_grid: Vec<f64>) -> PyResult<Py<PyAny>> {
    let p = analysis::shape_profile(&q_grid).or_py()?;
    report(py, &p)
}

/// Every reference check, as a list of `{"id", "name", "passed", "detail"}`.
#[pyfunction]
fn verify_all(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let checks = py.detach(verify::verify_all);
    report(py, &checks)
}

#[pymodule]
#[pyo3(name = "partial_theta")]
fn partial_theta_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySeries>()?;
    m.add_class::<PyZeroExpansion>()?;
    m.add("ConvergenceError", py.get_type::<ConvergenceError>())?;
    m.add("StructuralError", py.get_type::<StructuralError>())?;
    m.add_function(wrap_pyfunction!(euler_product, m)?)?;
    m.add_function(wrap_pyfunction!(triple_product_series, m)?)?;
    m.add_function(wrap_pyfunction!(rk_values, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(difference_monotonicity, m)?)?;
    m.add_function(wrap_pyfunction!(solve_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(delta_series, m)?)?;
    m.add_function(wrap_pyfunction!(stabilization_report, m)?)?;
    m.add_function(wrap_pyfunction!(theta_eval, m)?)?;
    m.add_function(wrap_pyfunction!(theta_dx, m)?)?;
    m.add_function(wrap_pyfunction!(find_zero, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(s_value, m)?)?;
    m.add_function(wrap_pyfunction!(t_value, m)?)?;
    m.add_function(wrap_pyfunction!(m_second_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(convexity, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
