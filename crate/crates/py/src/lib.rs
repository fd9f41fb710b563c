//! Python bindings for twistlab.
//!
//! Descriptors are passed as catalog names, file paths or JSON text. Reports with many fields
//! come back as dicts decoded from the same JSON the command line front end writes.
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use twistlab::cli::{self, Command, OutputFormat, RunConfig};
use twistlab::selberg::LFunctionDescriptor;
use twistlab::Error;

create_exception!(
    twistlab_py,
    NonConvergenceError,
    PyArithmeticError,
    "Numerical non-convergence."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence(_) | Error::IllConditioned(_) => {
            NonConvergenceError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load(desc: &str) -> PyResult<LFunctionDescriptor> {
    if desc.trim_start().starts_with('{') {
        LFunctionDescriptor::from_json(desc).map_err(to_py)
    } else {
        twistlab::catalog::load_descriptor(desc).map_err(to_py)
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Names of the built-in descriptors.
#[pyfunction]
fn catalog() -> Vec<&'static str> {
    twistlab::catalog::catalog()
}

/// Descriptor as JSON text.
#[pyfunction]
fn descriptor_json(desc: &str) -> PyResult<String> {
    Ok(load(desc)?.to_json())
}

/// d, q, xi, eta, theta, root and beta of a descriptor.
#[pyfunction]
fn invariants<'py>(py: Python<'py>, desc: &str) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &twistlab::selberg::invariants(&load(desc)?))
}

/// (member, n_alpha) for the spectrum test.
#[pyfunction]
fn spectrum(desc: &str, alpha: f64) -> PyResult<(bool, f64)> {
    let p = twistlab::twist::spectrum_membership(&load(desc)?, alpha).map_err(to_py)?;
    Ok((p.member, p.n_alpha))
}

/// Structural coefficients d_0..d_m by the recursion or the ray fit.
#[pyfunction]
#[pyo3(signature = (desc, m, method = "recursion"))]
fn structural_coefficients(desc: &str, m: usize, method: &str) -> PyResult<Vec<Complex64>> {
    let d = load(desc)?;
    match method {
        "recursion" => Ok(twistlab::structural::structural_coefficients(&d, m)
            .map_err(to_py)?
            .d_ell),
        "rayfit" => twistlab::structural::ray_fit_coefficients(&d, m).map_err(to_py),
        other => Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
}

/// Residue of F(s, alpha) at s*_l.
#[pyfunction]
fn residue(desc: &str, alpha: f64, ell: usize) -> PyResult<Complex64> {
    Ok(twistlab::twist::theorem3_residue(&load(desc)?, alpha, ell)
        .map_err(to_py)?
        .residue)
}

/// Partial sum of the twist up to `horizon`: (value, tail bound).
#[pyfunction]
fn twist_series(
    desc: &str,
    s: Complex64,
    alpha: f64,
    horizon: usize,
) -> PyResult<(Complex64, f64)> {
    let v = twistlab::twist::twist_series(&load(desc)?, s, alpha, horizon).map_err(to_py)?;
    Ok((v.value, v.tail_bound))
}

/// Continued value of F(s, alpha): (value, error estimate).
#[pyfunction]
#[pyo3(signature = (desc, s, alpha, x_ladder = None))]
fn continue_twist(
    desc: &str,
    s: Complex64,
    alpha: f64,
    x_ladder: Option<Vec<f64>>,
) -> PyResult<(Complex64, f64)> {
    let d = load(desc)?;
    let ladder = x_ladder.unwrap_or_else(|| twistlab::twist::default_ladder(d.degree()));
    let r = twistlab::twist::continue_twist(&d, s, alpha, &ladder, None).map_err(to_py)?;
    Ok((r.value, r.error))
}

/// Companion function conj F_l(s, alpha).
#[pyfunction]
fn f_bar(desc: &str, s: Complex64, alpha: f64, ell: usize) -> PyResult<Complex64> {
    let d = load(desc)?;
    let r = twistlab::twist::auto_strata(d.degree(), s.re);
    twistlab::twist::f_bar_ell(&d, s, alpha, ell, r).map_err(to_py)
}

/// Functional equation check at one point, as a dict.
#[pyfunction]
fn verify_fe<'py>(
    py: Python<'py>,
    desc: &str,
    s: Complex64,
    alpha: f64,
    k: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = twistlab::twist::FEConfig::default();
    let r = twistlab::twist::verify_fe(&load(desc)?, s, alpha, k, &cfg).map_err(to_py)?;
    to_dict(py, &r)
}

/// Strict functional equation detection, as a dict.
#[pyfunction]
fn detect_strict<'py>(py: Python<'py>, desc: &str) -> PyResult<Bound<'py, PyAny>> {
    to_dict(
        py,
        &twistlab::compat::detect_strict(&load(desc)?).map_err(to_py)?,
    )
}

/// Deviations of the residue identity for nu = 0..=nu_max.
#[pyfunction]
#[pyo3(signature = (desc, alpha, nu_max = 2))]
fn residue_identity(desc: &str, alpha: f64, nu_max: usize) -> PyResult<Vec<f64>> {
    twistlab::twist::residue_identity_check(&load(desc)?, alpha, nu_max).map_err(to_py)
}

/// Run a command line command and return its report text.
#[pyfunction]
#[pyo3(signature = (command, desc, alpha = None, s = None, k = None, m = None, format = "json"))]
fn run(
    command: &str,
    desc: &str,
    alpha: Option<f64>,
    s: Option<Complex64>,
    k: Option<usize>,
    m: Option<usize>,
    format: &str,
) -> PyResult<String> {
    let mut cfg = RunConfig::new(desc, command.parse::<Command>().map_err(to_py)?);
    cfg.alpha = alpha;
    cfg.s = s;
    cfg.k = k;
    cfg.m = m;
    cfg.output_format = format.parse::<OutputFormat>().map_err(to_py)?;
    let out = cli::run(&cfg);
    match out.error {
        None => Ok(out.report),
        Some(msg) if out.exit_code == 2 => Err(NonConvergenceError::new_err(msg)),
        Some(msg) => Err(PyValueError::new_err(msg)),
    }
}

#[pymodule]
pub fn twistlab_py(_py: Python, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add(
        "NonConvergenceError",
        m.py().get_type::<NonConvergenceError>(),
    )?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(descriptor_json, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(structural_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(residue, m)?)?;
    m.add_function(wrap_pyfunction!(twist_series, m)?)?;
    m.add_function(wrap_pyfunction!(continue_twist, m)?)?;
    m.add_function(wrap_pyfunction!(f_bar, m)?)?;
    m.add_function(wrap_pyfunction!(verify_fe, m)?)?;
    m.add_function(wrap_pyfunction!(detect_strict, m)?)?;
    m.add_function(wrap_pyfunction!(residue_identity, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
