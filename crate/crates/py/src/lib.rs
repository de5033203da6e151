//! Python bindings: `import branchon_py`.
//!
//! Branches are passed as the strings `"plus"` and `"minus"`. Invalid input
//! raises `ValueError`; convergence failures raise `RuntimeError`.

use branchon::classical::{self, BranchPolicy};
use branchon::model::{
    self, Branch, BranchedSystem, LienardParams, PhasePoint, SpecializedTypeI, StatePoint,
};
use branchon::perturbation;
use branchon::quantum::{self, Method, RadialProblem};
use branchon::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotConverged(_)
        | Error::QuadratureNotConverged(_)
        | Error::BasisTooSmall(_)
        | Error::BlowUp { .. }
        | Error::PoleCrossing { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn branch(label: &str) -> PyResult<Branch> {
    label.parse().map_err(to_py)
}

fn params(k: f64, lam: f64) -> PyResult<LienardParams> {
    LienardParams::new(k, lam).map_err(to_py)
}

fn radial(
    s: f64,
    lam: f64,
    branch_label: &str,
    size: usize,
    linear_term: bool,
) -> PyResult<RadialProblem> {
    let model = model::TypeIIModel::new(s, lam).map_err(to_py)?;
    let problem =
        RadialProblem::new(model, branch(branch_label)?, Method::Basis { size }).map_err(to_py)?;
    Ok(if linear_term {
        problem
    } else {
        problem.without_linear_term()
    })
}

/// Sampled solution of the cubic oscillator.
#[pyclass(get_all, frozen)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub accepted_steps: usize,
}

#[pymethods]
impl Trajectory {
    fn __len__(&self) -> usize {
        self.t.len()
    }
}

#[pyclass(get_all, frozen)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub eta: Vec<f64>,
    pub convergence_estimate: Vec<f64>,
    pub method: String,
    pub branch: String,
}

#[pyclass(get_all, frozen)]
pub struct Series {
    pub n: usize,
    pub branch: String,
    pub g: f64,
    pub coefficients: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub eta: Vec<f64>,
    pub radius_estimate: Option<f64>,
    pub basis_size: usize,
}

#[pyclass(get_all, frozen)]
pub struct Comparison {
    pub n: usize,
    pub branch: String,
    pub order: usize,
    pub eta_series: f64,
    pub eta_diag: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

/// Specialized Type I Hamiltonian `H_plus` or `H_minus` at `(x, p)`.
#[pyfunction]
#[pyo3(signature = (x, p, branch_label, k=1.0, lam=1.0))]
fn specialized_hamiltonian(x: f64, p: f64, branch_label: &str, k: f64, lam: f64) -> PyResult<f64> {
    model::typei_specialized_hamiltonian(
        PhasePoint::new(x, p),
        branch(branch_label)?,
        params(k, lam)?,
    )
    .map_err(to_py)
}

/// Velocities `(v_plus, v_minus)` of the specialized system at `(x, p)`.
#[pyfunction]
#[pyo3(signature = (x, p, k=1.0, lam=1.0))]
fn velocity_branches(x: f64, p: f64, k: f64, lam: f64) -> PyResult<(f64, f64)> {
    SpecializedTypeI::new(params(k, lam)?)
        .map_err(to_py)?
        .velocity_branches(x, p)
        .map_err(to_py)
}

/// Momentum `p* = 3 lam / (2k)` where the two branches meet.
#[pyfunction]
#[pyo3(signature = (k=1.0, lam=1.0))]
fn branch_point(k: f64, lam: f64) -> PyResult<f64> {
    model::typei_branch_point(params(k, lam)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, lam, x0, v0, t_end, tol=1e-10))]
fn integrate(
    py: Python<'_>,
    k: f64,
    lam: f64,
    x0: f64,
    v0: f64,
    t_end: f64,
    tol: f64,
) -> PyResult<Trajectory> {
    let p = params(k, lam)?;
    let traj = py
        .detach(|| classical::integrate(p, StatePoint::new(x0, v0), t_end, tol))
        .map_err(to_py)?;
    Ok(Trajectory {
        x: traj.states.iter().map(|s| s.x).collect(),
        v: traj.states.iter().map(|s| s.v).collect(),
        accepted_steps: traj.meta.accepted_steps,
        t: traj.times,
    })
}

/// `max|U'' + lam U| / max|U|` for the nonlocally transformed trajectory.
#[pyfunction]
#[pyo3(signature = (k, lam, x0, v0, t_end, tol=1e-10))]
fn transform_residual(
    py: Python<'_>,
    k: f64,
    lam: f64,
    x0: f64,
    v0: f64,
    t_end: f64,
    tol: f64,
) -> PyResult<f64> {
    let p = params(k, lam)?;
    py.detach(|| {
        let traj = classical::integrate(p, StatePoint::new(x0, v0), t_end, tol)?;
        let series = classical::nonlocal_transform(&traj, p)?;
        Ok(classical::harmonic_residual(&series, lam)?.relative())
    })
    .map_err(to_py)
}

/// Relative drift of the specialized Hamiltonian along a trajectory, with
/// the branch chosen from the sign of the pole argument at each sample.
#[pyfunction]
#[pyo3(signature = (k, lam, x0, v0, t_end, tol=1e-10))]
fn hamiltonian_drift(
    py: Python<'_>,
    k: f64,
    lam: f64,
    x0: f64,
    v0: f64,
    t_end: f64,
    tol: f64,
) -> PyResult<f64> {
    let p = params(k, lam)?;
    py.detach(|| {
        let traj = classical::integrate(p, StatePoint::new(x0, v0), t_end, tol)?;
        let sys = SpecializedTypeI::new(p)?;
        Ok(classical::hamiltonian_series(&traj, &sys, BranchPolicy::Auto, 1e-12)?.relative_drift())
    })
    .map_err(to_py)
}

/// Lowest `count` levels of the radial problem in an oscillator basis.
#[pyfunction]
#[pyo3(signature = (s, lam, branch_label="plus", count=5, size=60, linear_term=true))]
fn spectrum(
    py: Python<'_>,
    s: f64,
    lam: f64,
    branch_label: &str,
    count: usize,
    size: usize,
    linear_term: bool,
) -> PyResult<Spectrum> {
    let problem = radial(s, lam, branch_label, size, linear_term)?;
    let spec = py
        .detach(|| quantum::eigenvalues(&problem, count))
        .map_err(to_py)?;
    Ok(Spectrum {
        energies: spec.energies,
        eta: spec.eta,
        convergence_estimate: spec.convergence_estimate,
        method: spec.method,
        branch: spec.branch.as_str().to_string(),
    })
}

/// Perturbation coefficients `E_0 .. E_order` for level `n`.
#[pyfunction]
#[pyo3(signature = (n, order, s, lam, branch_label="plus", linear_term=true))]
fn rspt(
    py: Python<'_>,
    n: usize,
    order: usize,
    s: f64,
    lam: f64,
    branch_label: &str,
    linear_term: bool,
) -> PyResult<Series> {
    let problem = radial(s, lam, branch_label, 60, linear_term)?;
    let series = py
        .detach(|| perturbation::rspt_coefficients(n, order, &problem))
        .map_err(to_py)?;
    Ok(Series {
        eta: perturbation::eta_partial_sums(&series, &problem),
        n,
        branch: series.branch.as_str().to_string(),
        g: series.g,
        coefficients: series.coefficients,
        partial_sums: series.partial_sums,
        radius_estimate: series.radius_estimate,
        basis_size: series.basis_size,
    })
}

#[pyfunction]
#[pyo3(signature = (n, order, s, lam, branch_label="plus"))]
fn compare(
    py: Python<'_>,
    n: usize,
    order: usize,
    s: f64,
    lam: f64,
    branch_label: &str,
) -> PyResult<Comparison> {
    let problem = radial(s, lam, branch_label, 60, true)?;
    let report = py
        .detach(|| perturbation::compare_with_diagonalization(n, order, &problem))
        .map_err(to_py)?;
    Ok(Comparison {
        n,
        branch: report.branch.as_str().to_string(),
        order: report.order_used,
        eta_series: report.eta_series,
        eta_diag: report.eta_diag,
        abs_diff: report.abs_diff,
        rel_diff: report.relative_diff(),
    })
}

#[pymodule]
fn branchon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Trajectory>()?;
    m.add_class::<Spectrum>()?;
    m.add_class::<Series>()?;
    m.add_class::<Comparison>()?;
    m.add_function(wrap_pyfunction!(specialized_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(velocity_branches, m)?)?;
    m.add_function(wrap_pyfunction!(branch_point, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(transform_residual, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_drift, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(rspt, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
