//! Python bindings: time scales, expressions, integrals and chain checks.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tscalc_core::calculus::{self, Alpha};
use tscalc_core::cli::{self, RunConfig};
use tscalc_core::convexity;
use tscalc_core::expr;
use tscalc_core::inequalities::{self, VerifyOptions};
use tscalc_core::rectangle;
use tscalc_core::report;
use tscalc_core::timescale::{ScaleSpec, SideClass};
use tscalc_core::{Error, QuadratureConfig, RealFunction1D, RealFunction2D, RectangleDomain};

create_exception!(tscalc, TscalcError, PyValueError);

fn err(e: Error) -> PyErr {
    TscalcError::new_err(e.to_string())
}

fn alpha(v: f64) -> PyResult<Alpha> {
    Alpha::new(v).map_err(err)
}

fn quad(rel_tol: Option<f64>) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = rel_tol {
        cfg.rel_tol = t;
    }
    cfg
}

fn side(s: SideClass) -> &'static str {
    match s {
        SideClass::Scattered => "scattered",
        SideClass::Dense => "dense",
        SideClass::Boundary => "boundary",
    }
}

fn f1(src: &str) -> PyResult<RealFunction1D> {
    RealFunction1D::parse(src).map_err(err)
}

fn f2(src: &str) -> PyResult<RealFunction2D> {
    RealFunction2D::parse(src).map_err(err)
}

/// A closed subset of ℝ made of finitely many points and closed intervals.
#[pyclass(name = "TimeScale", frozen, skip_from_py_object, module = "tscalc")]
#[derive(Clone)]
struct PyTimeScale {
    inner: tscalc_core::TimeScale,
}

impl PyTimeScale {
    fn wrap(r: tscalc_core::Result<tscalc_core::TimeScale>) -> PyResult<Self> {
        r.map(|inner| Self { inner }).map_err(err)
    }
}

#[pymethods]
impl PyTimeScale {
    #[staticmethod]
    fn integers(lo: i64, hi: i64) -> PyResult<Self> {
        Self::wrap(tscalc_core::TimeScale::integers(lo, hi))
    }

    #[staticmethod]
    fn h_grid(h: f64, lo: f64, hi: f64) -> PyResult<Self> {
        Self::wrap(tscalc_core::TimeScale::h_grid(h, lo, hi))
    }

    #[staticmethod]
    fn q_scale(q: f64, kmin: i32, kmax: i32) -> PyResult<Self> {
        Self::wrap(tscalc_core::TimeScale::q_scale(q, kmin, kmax))
    }

    #[staticmethod]
    fn interval(lo: f64, hi: f64) -> PyResult<Self> {
        Self::wrap(tscalc_core::TimeScale::interval(lo, hi))
    }

    #[staticmethod]
    fn points(values: Vec<f64>) -> PyResult<Self> {
        Self::wrap(tscalc_core::TimeScale::points(values))
    }

    /// Builds a scale from a JSON spec such as `{"kind": "integers", "lo": 0, "hi": 5}`.
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<Self> {
        let spec: ScaleSpec = serde_json::from_str(spec).map_err(|e| TscalcError::new_err(e.to_string()))?;
        Self::wrap(spec.build())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_spec()).expect("scale specs serialize")
    }

    #[getter]
    fn min(&self) -> f64 {
        self.inner.min()
    }

    #[getter]
    fn max(&self) -> f64 {
        self.inner.max()
    }

    fn __contains__(&self, t: f64) -> bool {
        self.inner.contains(t)
    }

    fn sigma(&self, t: f64) -> PyResult<f64> {
        self.inner.sigma(t).map_err(err)
    }

    fn rho(&self, t: f64) -> PyResult<f64> {
        self.inner.rho(t).map_err(err)
    }

    /// (μ(t), ν(t)).
    fn graininess(&self, t: f64) -> PyResult<(f64, f64)> {
        self.inner.graininess(t).map_err(err)
    }

    /// (left, right), each "scattered", "dense" or "boundary".
    fn classify(&self, t: f64) -> PyResult<(&'static str, &'static str)> {
        let c = self.inner.classify(t).map_err(err)?;
        Ok((side(c.left), side(c.right)))
    }

    #[pyo3(signature = (f, a, b, *, rel_tol=None))]
    fn delta_integral(&self, f: &str, a: f64, b: f64, rel_tol: Option<f64>) -> PyResult<f64> {
        calculus::delta_integral(&self.inner, &f1(f)?, a, b, &quad(rel_tol)).map_err(err)
    }

    #[pyo3(signature = (f, a, b, *, rel_tol=None))]
    fn nabla_integral(&self, f: &str, a: f64, b: f64, rel_tol: Option<f64>) -> PyResult<f64> {
        calculus::nabla_integral(&self.inner, &f1(f)?, a, b, &quad(rel_tol)).map_err(err)
    }

    #[pyo3(signature = (f, a, b, alpha=0.5, *, rel_tol=None))]
    fn diamond_integral(&self, f: &str, a: f64, b: f64, alpha: f64, rel_tol: Option<f64>) -> PyResult<f64> {
        calculus::diamond_alpha_integral(&self.inner, &f1(f)?, a, b, self::alpha(alpha)?, &quad(rel_tol)).map_err(err)
    }

    fn delta_derivative(&self, f: &str, t: f64) -> PyResult<f64> {
        calculus::delta_derivative(&self.inner, &f1(f)?, t, &quad(None)).map_err(err)
    }

    fn nabla_derivative(&self, f: &str, t: f64) -> PyResult<f64> {
        calculus::nabla_derivative(&self.inner, &f1(f)?, t, &quad(None)).map_err(err)
    }

    #[pyo3(signature = (f, t, alpha=0.5))]
    fn diamond_derivative(&self, f: &str, t: f64, alpha: f64) -> PyResult<f64> {
        calculus::diamond_alpha_derivative(&self.inner, &f1(f)?, t, self::alpha(alpha)?, &quad(None)).map_err(err)
    }

    /// The ◇α centroid of [a, b].
    #[pyo3(signature = (a, b, alpha=0.5))]
    fn t_alpha(&self, a: f64, b: f64, alpha: f64) -> PyResult<f64> {
        calculus::t_alpha(&self.inner, a, b, self::alpha(alpha)?, &quad(None)).map_err(err)
    }

    /// True when no sampled chord lies below the graph.
    fn is_convex(&self, f: &str, a: f64, b: f64) -> PyResult<bool> {
        Ok(convexity::check_convex_1d(&self.inner, &f1(f)?, a, b, None).map_err(err)?.convex)
    }

    fn __repr__(&self) -> String {
        format!("TimeScale({})", self.to_json())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// A parsed arithmetic expression in x and optionally y.
#[pyclass(name = "Expr", frozen, module = "tscalc")]
struct PyExpr {
    source: String,
    inner: expr::Expr,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let inner = expr::parse(source).map_err(|e| err(e.into()))?;
        Ok(Self {
            source: source.to_string(),
            inner,
        })
    }

    #[pyo3(signature = (x, y=None))]
    fn __call__(&self, x: f64, y: Option<f64>) -> PyResult<f64> {
        self.inner.evaluate(x, y).map_err(|e| err(e.into()))
    }

    /// Names of the variables the expression mentions.
    fn variables(&self) -> Vec<String> {
        self.inner
            .free_variables()
            .iter()
            .map(|v| match v {
                expr::Var::X => "x".to_string(),
                expr::Var::Y => "y".to_string(),
            })
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.source)
    }
}

/// The result of checking one inequality chain.
#[pyclass(name = "ChainReport", frozen, module = "tscalc")]
struct PyChainReport {
    inner: inequalities::ChainReport,
}

#[pymethods]
impl PyChainReport {
    #[getter]
    fn chain_id(&self) -> &'static str {
        self.inner.chain_id.as_str()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn t_alpha(&self) -> Option<f64> {
        self.inner.t_alpha
    }

    #[getter]
    fn s_alpha(&self) -> Option<f64> {
        self.inner.s_alpha
    }

    /// (label, value) pairs, left to right.
    #[getter]
    fn members(&self) -> Vec<(String, f64)> {
        self.inner.members.iter().map(|m| (m.label.clone(), m.value)).collect()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.members.iter().map(|m| m.value).collect()
    }

    /// Slack of each link (right member minus left member).
    #[getter]
    fn slacks(&self) -> Vec<f64> {
        self.inner.verdicts.iter().map(|v| v.slack).collect()
    }

    #[getter]
    fn satisfied(&self) -> bool {
        self.inner.all_satisfied()
    }

    #[getter]
    fn hypothesis_failed(&self) -> bool {
        self.inner.hypothesis_failed()
    }

    /// (A1, A2, A3, A4) for boundary chains.
    #[getter]
    fn coefficients(&self) -> Option<(f64, f64, f64, f64)> {
        self.inner.coefficients.map(|k| (k.a1, k.a2, k.a3, k.a4))
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    #[getter]
    fn error(&self) -> Option<String> {
        self.inner.error.clone()
    }

    fn to_json(&self) -> String {
        report::to_json(std::slice::from_ref(&self.inner))
    }

    fn to_text(&self) -> String {
        report::to_text(std::slice::from_ref(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainReport({}, alpha={}, satisfied={})",
            self.chain_id(),
            self.inner.alpha,
            self.inner.all_satisfied()
        )
    }
}

fn wrap_report(r: tscalc_core::Result<inequalities::ChainReport>) -> PyResult<PyChainReport> {
    r.map(|inner| PyChainReport { inner }).map_err(err)
}

fn options(check_hypothesis: bool) -> VerifyOptions {
    VerifyOptions {
        check_hypothesis,
        ..VerifyOptions::default()
    }
}

fn rect(t1: &PyTimeScale, t2: &PyTimeScale, window: Option<(f64, f64, f64, f64)>) -> PyResult<RectangleDomain> {
    let (a, b, c, d) = window.unwrap_or((t1.inner.min(), t1.inner.max(), t2.inner.min(), t2.inner.max()));
    RectangleDomain::new(t1.inner.clone(), (a, b), t2.inner.clone(), (c, d)).map_err(err)
}

/// ∫∫ f ◇α x ◇α y over the rectangle (default: both scales in full).
#[pyfunction]
#[pyo3(signature = (f, t1, t2, alpha=0.5, window=None))]
fn double_integral(f: &str, t1: &PyTimeScale, t2: &PyTimeScale, alpha: f64, window: Option<(f64, f64, f64, f64)>) -> PyResult<f64> {
    rectangle::double_integral(&rect(t1, t2, window)?, &f2(f)?, self::alpha(alpha)?, &quad(None)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, ts, a, b, alpha=0.5, *, check_hypothesis=true))]
fn verify_dinu_1d(f: &str, ts: &PyTimeScale, a: f64, b: f64, alpha: f64, check_hypothesis: bool) -> PyResult<PyChainReport> {
    wrap_report(inequalities::verify_dinu_1d(&ts.inner, &f1(f)?, a, b, self::alpha(alpha)?, &options(check_hypothesis)))
}

#[pyfunction]
#[pyo3(signature = (f, t1, t2, alpha=0.5, window=None, *, check_hypothesis=true))]
fn verify_mr1(
    f: &str,
    t1: &PyTimeScale,
    t2: &PyTimeScale,
    alpha: f64,
    window: Option<(f64, f64, f64, f64)>,
    check_hypothesis: bool,
) -> PyResult<PyChainReport> {
    let r = rect(t1, t2, window)?;
    wrap_report(inequalities::verify_mr1(&r, &f2(f)?, self::alpha(alpha)?, &options(check_hypothesis)))
}

#[pyfunction]
#[pyo3(signature = (f, t1, t2, alpha=0.5, window=None, *, check_hypothesis=true))]
fn verify_mr2(
    f: &str,
    t1: &PyTimeScale,
    t2: &PyTimeScale,
    alpha: f64,
    window: Option<(f64, f64, f64, f64)>,
    check_hypothesis: bool,
) -> PyResult<PyChainReport> {
    let r = rect(t1, t2, window)?;
    wrap_report(inequalities::verify_mr2(&r, &f2(f)?, self::alpha(alpha)?, &options(check_hypothesis)))
}

#[pyfunction]
#[pyo3(signature = (f, t1, t2, alpha=0.5, window=None, *, check_hypothesis=true))]
fn verify_mr3(
    f: &str,
    t1: &PyTimeScale,
    t2: &PyTimeScale,
    alpha: f64,
    window: Option<(f64, f64, f64, f64)>,
    check_hypothesis: bool,
) -> PyResult<PyChainReport> {
    let r = rect(t1, t2, window)?;
    wrap_report(inequalities::verify_mr3(&r, &f2(f)?, self::alpha(alpha)?, &options(check_hypothesis)))
}

#[pyfunction]
#[pyo3(signature = (f, a, b, c, d, *, check_hypothesis=true))]
fn verify_dragomir_r(f: &str, a: f64, b: f64, c: f64, d: f64, check_hypothesis: bool) -> PyResult<PyChainReport> {
    wrap_report(inequalities::verify_dragomir_r(&f2(f)?, a, b, c, d, &options(check_hypothesis)))
}

/// The integer-grid example on ℤ × ℤ with window [0, 2] × [1, 3].
#[pyfunction]
#[pyo3(signature = (f, *, check_hypothesis=true))]
fn verify_grid_example(f: &str, check_hypothesis: bool) -> PyResult<PyChainReport> {
    wrap_report(inequalities::verify_grid_example(&f2(f)?, &options(check_hypothesis)))
}

/// Runs a JSON run configuration, as accepted by `tscalc verify --config`.
#[pyfunction]
fn run_config(py: Python<'_>, config: &str) -> PyResult<Vec<PyChainReport>> {
    let cfg = RunConfig::from_json(config).map_err(err)?;
    let reports = py.detach(|| cli::run(&cfg)).map_err(err)?;
    Ok(reports.into_iter().map(|inner| PyChainReport { inner }).collect())
}

#[pymodule]
fn tscalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TscalcError", m.py().get_type::<TscalcError>())?;
    m.add_class::<PyTimeScale>()?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyChainReport>()?;
    m.add_function(wrap_pyfunction!(double_integral, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dinu_1d, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mr1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mr2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mr3, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dragomir_r, m)?)?;
    m.add_function(wrap_pyfunction!(verify_grid_example, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
