//! Python module `snc`. Structured results are returned as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use snc_core::channel::{find_alpha_star, ChannelConfig, Environment, DEFAULT_ALPHA_TOL};
use snc_core::harness::{
    run_monte_carlo, run_toy_scenario, score, solve_methods, Scenario, ToyLayout, DEFAULT_METHODS,
};
use snc_core::pwl::fit_profit_curve;
use snc_core::regional::{optimal_regional_incentive, RegionalModel};
use snc_core::{Method, PersuasionFit, SncError};

create_exception!(snc, SncCoreError, PyException);

fn err(e: SncError) -> PyErr {
    SncCoreError::new_err(e.to_string())
}

/// Serializes through JSON so Python receives ordinary dicts.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| SncCoreError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn scenario_from(preset: &str, scenario_json: Option<&str>) -> PyResult<Scenario> {
    match scenario_json {
        Some(text) => Scenario::from_json(text),
        None => Scenario::preset(preset),
    }
    .map_err(err)
}

fn fit_from(k: Option<(f64, f64)>) -> PyResult<PersuasionFit> {
    match k {
        Some((k1, k2)) => PersuasionFit::new(k1, k2).map_err(err),
        None => Ok(PersuasionFit::default()),
    }
}

/// β(τ), the distance decay of the acceptance probability.
#[pyfunction]
#[pyo3(signature = (tau, fit=None))]
fn beta(tau: f64, fit: Option<(f64, f64)>) -> PyResult<f64> {
    snc_core::beta(tau, &fit_from(fit)?).map_err(err)
}

/// `(tau, profit)` maximizing the expected revenue from a user `d` metres out.
#[pyfunction]
#[pyo3(signature = (d, fit=None))]
fn optimal_incentive(d: f64, fit: Option<(f64, f64)>) -> PyResult<(f64, f64)> {
    snc_core::optimal_incentive(d, &fit_from(fit)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (environment="dense-urban", fc_hz=2.5e9, gamma_db=90.0))]
fn alpha_star<'py>(py: Python<'py>, environment: &str, fc_hz: f64, gamma_db: f64) -> PyResult<Bound<'py, PyAny>> {
    let env = Environment::preset(environment).map_err(err)?;
    let cfg = ChannelConfig::new(fc_hz, gamma_db).map_err(err)?;
    to_py(py, &find_alpha_star(&env, &cfg, DEFAULT_ALPHA_TOL).map_err(err)?)
}

/// Scenario JSON for a built-in preset, ready to edit and pass back.
#[pyfunction]
#[pyo3(signature = (preset="paper-default"))]
fn scenario_json(preset: &str) -> PyResult<String> {
    Ok(scenario_from(preset, None)?.to_json())
}

#[derive(Serialize)]
struct Solved {
    score: f64,
    solution: snc_core::SncSolution,
}

/// Solves one scenario with `method` (usnc, jsnc, semi-jsnc, exact-oracle, no-uil).
#[pyfunction]
#[pyo3(signature = (method, preset="paper-default", scenario=None, seed=None))]
fn solve<'py>(
    py: Python<'py>,
    method: &str,
    preset: &str,
    scenario: Option<&str>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let m: Method = method.parse().map_err(SncCoreError::new_err)?;
    let mut s = scenario_from(preset, scenario)?;
    if let Some(seed) = seed {
        s.search.seed = seed;
    }
    let p = s.prepare().map_err(err)?;
    let users = s.users();
    let (_, res) = py
        .detach(|| solve_methods(&users, &p, &[m]))
        .pop()
        .expect("one method requested");
    let solution = res.map_err(err)?;
    to_py(
        py,
        &Solved {
            score: score(&solution, &users, &p),
            solution,
        },
    )
}

#[pyfunction]
fn run_toy<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &py.detach(|| run_toy_scenario(&ToyLayout::default())).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (trials=100, seed=0, users=None, preset="paper-default", scenario=None))]
fn monte_carlo<'py>(
    py: Python<'py>,
    trials: usize,
    seed: u64,
    users: Option<usize>,
    preset: &str,
    scenario: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = scenario_from(preset, scenario)?;
    let p = s.prepare().map_err(err)?;
    let n = users.unwrap_or_else(|| s.user_count());
    let report = py
        .detach(|| run_monte_carlo(&p, n, trials, &DEFAULT_METHODS, seed))
        .map_err(err)?;
    to_py(py, &report)
}

/// Optimal regional discount; `d_u` defaults to `world - radius`.
#[pyfunction]
#[pyo3(signature = (radius, world, d_u=None))]
fn regional_optimum<'py>(py: Python<'py>, radius: f64, world: f64, d_u: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let m = RegionalModel::new(
        radius,
        world,
        d_u.unwrap_or(world - radius),
        0.0,
        PersuasionFit::default(),
    )
    .map_err(err)?;
    to_py(py, &optimal_regional_incentive(&m).map_err(err)?)
}

#[pyfunction]
fn tau_infinity<'py>(py: Python<'py>, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &snc_core::tau_infinity(radius, &PersuasionFit::default()).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (breakpoints=3, d_u=200.0, samples=2000))]
fn fit_pwl<'py>(py: Python<'py>, breakpoints: usize, d_u: f64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &fit_profit_curve(&PersuasionFit::default(), breakpoints, d_u, samples).map_err(err)?,
    )
}

#[pymodule]
fn snc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SncCoreError", m.py().get_type::<SncCoreError>())?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_incentive, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_star, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_json, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_toy, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(regional_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(tau_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(fit_pwl, m)?)?;
    Ok(())
}
