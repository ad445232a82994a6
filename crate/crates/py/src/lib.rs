//! Python bindings for `nodal-core`.
//!
//! Rationals cross the boundary as `fractions.Fraction`; inputs may be
//! `int`, `Fraction` or canonical `"p/q"` strings.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use nodal_core::cobordism::{self, AltPairClass, Descriptor, DoublePointData, PairClass};
use nodal_core::quasimodular::FormCatalog;
use nodal_core::rational::{self, Rational};
use nodal_core::series::{PowerSeries as CoreSeries, Variable};
use nodal_core::severi::{self as sv, SeveriKey, SeveriTable as CoreTable, TangencyProfile};
use nodal_core::universal::{self, FitConfig, GyzFit, MultiplicativeFit};

create_exception!(nodal, NodalError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    NodalError::new_err(e.to_string())
}

fn to_fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((rational::to_text(r),))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    rational::parse(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_var(s: &str) -> PyResult<Variable> {
    match s {
        "q" => Ok(Variable::Q),
        "x" => Ok(Variable::X),
        _ => Err(PyValueError::new_err(format!("unknown variable {s:?}"))),
    }
}

type ClassTuple = (i64, i64, i64, i64);

fn class(t: ClassTuple) -> PairClass {
    PairClass::new(t.0, t.1, t.2, t.3)
}

fn tuple(c: PairClass) -> ClassTuple {
    (c.l2, c.lk, c.c1sq, c.c2)
}

/// Truncated power series with exact rational coefficients.
#[pyclass(name = "PowerSeries", module = "nodal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPowerSeries {
    inner: CoreSeries,
}

impl From<CoreSeries> for PyPowerSeries {
    fn from(inner: CoreSeries) -> Self {
        PyPowerSeries { inner }
    }
}

#[pymethods]
impl PyPowerSeries {
    #[new]
    #[pyo3(signature = (coeffs, var = "q"))]
    fn new(coeffs: Vec<Bound<'_, PyAny>>, var: &str) -> PyResult<Self> {
        let coeffs = coeffs.iter().map(from_py).collect::<PyResult<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(PyValueError::new_err("a series needs at least one coefficient"));
        }
        Ok(CoreSeries::new(parse_var(var)?, coeffs).into())
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        CoreSeries::from_json(s).map(Into::into).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn var(&self) -> &'static str {
        self.inner.var().as_str()
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.coeffs().iter().map(|c| to_fraction(py, c)).collect()
    }

    fn __getitem__<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
        if n > self.inner.order() {
            return Err(pyo3::exceptions::PyIndexError::new_err(n));
        }
        to_fraction(py, self.inner.coeff(n))
    }

    fn __len__(&self) -> usize {
        self.inner.order() + 1
    }

    fn __repr__(&self) -> String {
        format!("PowerSeries({})", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: &Self) -> Self {
        (&self.inner + &other.inner).into()
    }

    fn __sub__(&self, other: &Self) -> Self {
        (&self.inner - &other.inner).into()
    }

    fn __mul__(&self, other: &Self) -> Self {
        (&self.inner * &other.inner).into()
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        self.inner.checked_div(&other.inner).map(Into::into).map_err(err)
    }

    fn truncate(&self, order: usize) -> Self {
        self.inner.truncate(order).into()
    }

    fn inverse(&self) -> PyResult<Self> {
        self.inner.inverse().map(Into::into).map_err(err)
    }

    fn exp(&self) -> PyResult<Self> {
        self.inner.exp().map(Into::into).map_err(err)
    }

    fn log(&self) -> PyResult<Self> {
        self.inner.log().map(Into::into).map_err(err)
    }

    fn pow(&self, e: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.inner.pow(&from_py(e)?).map(Into::into).map_err(err)
    }

    fn compose(&self, inner: &Self) -> PyResult<Self> {
        self.inner.compose(&inner.inner).map(Into::into).map_err(err)
    }

    fn revert(&self) -> PyResult<Self> {
        self.inner.revert().map(Into::into).map_err(err)
    }

    /// `q d/dq`.
    fn diff_d(&self) -> Self {
        self.inner.diff_d().into()
    }

    fn shift_down(&self, k: usize) -> PyResult<Self> {
        self.inner.shift_down(k).map(Into::into).map_err(err)
    }
}

/// Memoized table of generalized Severi degrees.
#[pyclass(name = "SeveriTable", module = "nodal", frozen)]
struct PySeveriTable {
    inner: Arc<CoreTable>,
}

#[pymethods]
impl PySeveriTable {
    #[new]
    fn new() -> Self {
        PySeveriTable { inner: Arc::new(CoreTable::new()) }
    }

    #[pyo3(signature = (d, delta, alpha = "", beta = None))]
    fn severi(&self, py: Python<'_>, d: u32, delta: i64, alpha: &str, beta: Option<&str>) -> PyResult<Py<PyAny>> {
        let key = parse_key(d, delta, alpha, beta)?;
        let v = py.detach(|| self.inner.relative(&key)).map_err(err)?;
        big_to_py(py, &v.to_string())
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.stats();
        let d = PyDict::new(py);
        d.set_item("entries", s.entries)?;
        d.set_item("hits", s.hits)?;
        d.set_item("misses", s.misses)?;
        Ok(d)
    }

    fn clear(&self) {
        self.inner.clear()
    }

    fn load(&self, path: PathBuf) -> PyResult<usize> {
        self.inner.load(&path).map_err(err)
    }

    fn persist(&self, path: PathBuf) -> PyResult<usize> {
        self.inner.persist(&path).map_err(err)
    }
}

fn parse_key(d: u32, delta: i64, alpha: &str, beta: Option<&str>) -> PyResult<SeveriKey> {
    let alpha = alpha.parse().map_err(err)?;
    let beta = match beta {
        Some(b) => b.parse().map_err(err)?,
        None => {
            let rest = (d as u64).saturating_sub(TangencyProfile::weight(&alpha));
            TangencyProfile::single(1, rest as u32)
        }
    };
    SeveriKey::new(d, delta, alpha, beta).map_err(err)
}

fn big_to_py(py: Python<'_>, digits: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("builtins")?.getattr("int")?.call1((digits,))?.unbind())
}

fn table_or_new(table: Option<&PySeveriTable>) -> Arc<CoreTable> {
    table.map(|t| t.inner.clone()).unwrap_or_else(|| Arc::new(CoreTable::new()))
}

/// `N^{d,delta}(alpha, beta)` with a throwaway table.
#[pyfunction]
#[pyo3(signature = (d, delta, alpha = "", beta = None))]
fn severi(py: Python<'_>, d: u32, delta: i64, alpha: &str, beta: Option<&str>) -> PyResult<Py<PyAny>> {
    PySeveriTable::new().severi(py, d, delta, alpha, beta)
}

/// `sum_r N^{d,r} x^r` through `x^order`.
#[pyfunction]
#[pyo3(signature = (d, order, unsafe_thresholds = false, table = None))]
fn p2_series(
    py: Python<'_>,
    d: u32,
    order: usize,
    unsafe_thresholds: bool,
    table: Option<&PySeveriTable>,
) -> PyResult<PyPowerSeries> {
    let t = table_or_new(table);
    py.detach(|| sv::p2_series(&t, d, order, unsafe_thresholds))
        .map(Into::into)
        .map_err(err)
}

/// Interpolates `N^{d,delta}` over degrees `lo..=hi`; returns
/// `(coefficients, fits, first_mismatch)`.
#[pyfunction]
#[pyo3(signature = (delta, lo, hi, table = None))]
fn node_poly_check<'py>(
    py: Python<'py>,
    delta: u32,
    lo: u32,
    hi: u32,
    table: Option<&PySeveriTable>,
) -> PyResult<(Vec<Bound<'py, PyAny>>, bool, Option<u32>)> {
    let t = table_or_new(table);
    let report = py.detach(|| sv::node_poly_check(&t, delta, lo..=hi)).map_err(err)?;
    let coeffs = report.polynomial.iter().map(|c| to_fraction(py, c)).collect::<PyResult<_>>()?;
    Ok((coeffs, report.fits, report.first_mismatch))
}

/// Coefficients `(a1, a2, a3, a4)` in the standard basis.
#[pyfunction]
fn decompose(v: ClassTuple) -> PyResult<(i64, i64, i64, i64)> {
    let a = class(v).decompose().map_err(err)?;
    Ok((a.a1, a.a2, a.a3, a.a4))
}

/// `(L2, LK, c1sq, c2)` to `(LK, chiL, chiO, Ksq)`.
#[pyfunction]
fn to_alt(v: ClassTuple) -> PyResult<ClassTuple> {
    let a = class(v).to_alt().map_err(err)?;
    Ok((a.lk, a.chi_l, a.chi_o, a.ksq))
}

#[pyfunction]
fn from_alt(alt: ClassTuple) -> ClassTuple {
    tuple(PairClass::from_alt(&AltPairClass { lk: alt.0, chi_l: alt.1, chi_o: alt.2, ksq: alt.3 }))
}

/// Class of a named pair: `plane(d)`, `quadric(a, b)`, `k3(l2)` or
/// `hirzebruch(k, c, e)`.
#[pyfunction]
#[pyo3(signature = (kind, *params))]
fn class_of(kind: &str, params: Vec<i64>) -> PyResult<ClassTuple> {
    let desc = match (kind, params.as_slice()) {
        ("plane", &[d]) => Descriptor::Plane { d },
        ("quadric", &[a, b]) => Descriptor::Quadric { a, b },
        ("k3", &[l2]) => Descriptor::K3 { l2 },
        ("hirzebruch", &[k, c, e]) => Descriptor::Hirzebruch { k, c, e },
        _ => return Err(PyValueError::new_err(format!("bad descriptor {kind}{params:?}"))),
    };
    desc.class().map(tuple).map_err(err)
}

#[pyfunction]
fn is_basis(vs: [ClassTuple; 4]) -> bool {
    cobordism::is_basis(&vs.map(class))
}

/// Returns `(v3, v0)` with `v0 = v1 + v2 - v3`.
#[pyfunction]
fn close_relation(v1: ClassTuple, v2: ClassTuple, g_d: u32, deg_ld: i64) -> (ClassTuple, ClassTuple) {
    let (v3, v0) = cobordism::close_relation(class(v1), class(v2), DoublePointData { g_d, deg_ld });
    (tuple(v3), tuple(v0))
}

/// Fitted multiplicative series and their reparametrized forms.
#[pyclass(name = "Fit", module = "nodal", frozen)]
struct PyFit {
    a: MultiplicativeFit,
    b: GyzFit,
}

#[pymethods]
impl PyFit {
    #[getter]
    fn order(&self) -> usize {
        self.a.order()
    }

    #[getter]
    fn degrees(&self) -> (u32, u32) {
        self.a.config.degrees
    }

    #[getter]
    fn k3(&self) -> (i64, i64) {
        self.a.config.k3
    }

    #[getter(A)]
    fn a_series(&self) -> Vec<PyPowerSeries> {
        self.a.a.iter().cloned().map(Into::into).collect()
    }

    #[getter(log_A)]
    fn log_a(&self) -> Vec<PyPowerSeries> {
        self.a.log_a.iter().cloned().map(Into::into).collect()
    }

    #[getter(B)]
    fn b_series<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, s) in [("B1", &self.b.b1), ("B2", &self.b.b2), ("B3", &self.b.b3), ("B4", &self.b.b4)] {
            d.set_item(k, PyPowerSeries::from(s.clone()))?;
        }
        Ok(d)
    }

    /// True when both closed-form identities hold through the fitted order.
    #[getter]
    fn consistent(&self) -> bool {
        self.b.residuals.consistent()
    }

    /// `T_r` as a dict `{(e_L2, e_LK, e_c1sq, e_c2): Fraction}`.
    #[pyo3(name = "T")]
    fn universal_t<'py>(&self, py: Python<'py>, r: usize) -> PyResult<Bound<'py, PyDict>> {
        let t = self.a.universal_t(r).map_err(err)?;
        let d = PyDict::new(py);
        for (e, c) in t.poly.iter() {
            d.set_item((e[0], e[1], e[2], e[3]), to_fraction(py, c)?)?;
        }
        Ok(d)
    }

    /// `T_r` evaluated at a class.
    fn t_value<'py>(&self, py: Python<'py>, r: usize, v: ClassTuple) -> PyResult<Bound<'py, PyAny>> {
        let t = self.a.universal_t(r).map_err(err)?;
        to_fraction(py, &t.eval(&class(v)))
    }

    fn evaluate(&self, v: ClassTuple, order: usize) -> PyResult<PyPowerSeries> {
        self.a.evaluate(&class(v), order).map(Into::into).map_err(err)
    }

    /// The same generating function in `q` via the reparametrized series.
    fn gamma(&self, v: ClassTuple) -> PyResult<PyPowerSeries> {
        self.b.gamma(&class(v)).map(Into::into).map_err(err)
    }
}

/// Fits `A1..A4` and `B1..B4` through `x^order`.
#[pyfunction]
#[pyo3(signature = (order, degrees = None, k3 = None, unsafe_thresholds = false, table = None))]
fn fit(
    py: Python<'_>,
    order: usize,
    degrees: Option<(u32, u32)>,
    k3: Option<(i64, i64)>,
    unsafe_thresholds: bool,
    table: Option<&PySeveriTable>,
) -> PyResult<PyFit> {
    let mut cfg = FitConfig::for_order(order);
    if let Some(d) = degrees {
        cfg.degrees = d;
    }
    if let Some(k) = k3 {
        cfg.k3 = k;
    }
    cfg.unsafe_thresholds = unsafe_thresholds;
    let t = table_or_new(table);
    py.detach(|| -> nodal_core::error::Result<PyFit> {
        let a = universal::fit_a(&cfg, &t)?;
        let b = universal::fit_b(&a, order)?;
        Ok(PyFit { a, b })
    })
    .map_err(err)
}

/// Generating function of a class through `x^order`, fitting as needed.
#[pyfunction]
fn evaluate(py: Python<'_>, v: ClassTuple, order: usize) -> PyResult<PyPowerSeries> {
    fit(py, order, None, None, false, None)?.evaluate(v, order)
}

/// Returns `(valuation, unit)`; the series is `q^valuation * unit`.
#[pyfunction]
#[pyo3(signature = (r, ksq, m, chi_o, order, fit = None))]
fn genus_series(
    py: Python<'_>,
    r: u32,
    ksq: i64,
    m: i64,
    chi_o: i64,
    order: usize,
    fit: Option<&PyFit>,
) -> PyResult<(usize, PyPowerSeries)> {
    let owned;
    let gyz = match fit {
        Some(f) => Some(&f.b),
        None if ksq != 0 || m != 0 => {
            owned = self::fit(py, order, None, None, false, None)?;
            Some(&owned.b)
        }
        None => None,
    };
    let s = universal::genus_series(r, ksq, m, chi_o, order, gyz).map_err(err)?;
    Ok((s.valuation, s.unit.into()))
}

/// `{"G2", "DG2", "D2G2", "Delta"}` through `q^order`.
#[pyfunction]
fn forms<'py>(py: Python<'py>, order: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = FormCatalog::new(order).map_err(err)?;
    let d = PyDict::new(py);
    for (k, s) in [("G2", c.g2), ("DG2", c.dg2), ("D2G2", c.d2g2), ("Delta", c.delta)] {
        d.set_item(k, PyPowerSeries::from(s))?;
    }
    Ok(d)
}

#[pymodule]
fn nodal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NodalError", m.py().get_type::<NodalError>())?;
    m.add_class::<PyPowerSeries>()?;
    m.add_class::<PySeveriTable>()?;
    m.add_class::<PyFit>()?;
    m.add_function(wrap_pyfunction!(severi, m)?)?;
    m.add_function(wrap_pyfunction!(p2_series, m)?)?;
    m.add_function(wrap_pyfunction!(node_poly_check, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(to_alt, m)?)?;
    m.add_function(wrap_pyfunction!(from_alt, m)?)?;
    m.add_function(wrap_pyfunction!(class_of, m)?)?;
    m.add_function(wrap_pyfunction!(is_basis, m)?)?;
    m.add_function(wrap_pyfunction!(close_relation, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(genus_series, m)?)?;
    m.add_function(wrap_pyfunction!(forms, m)?)?;
    m.add("__all__", PyList::new(m.py(), [
        "PowerSeries", "SeveriTable", "Fit", "NodalError", "severi", "p2_series",
        "node_poly_check", "decompose", "to_alt", "from_alt", "class_of", "is_basis",
        "close_relation", "fit", "evaluate", "genus_series", "forms",
    ])?)?;
    Ok(())
}
