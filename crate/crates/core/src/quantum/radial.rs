use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::{jacobi_eigen, SymMatrix};
use super::quadrature::gauss_laguerre_cached;
use super::special::{gamma, laguerre, laguerre_table, ln_gamma};
use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};
use crate::model::{Branch, TypeIIModel};

/// Change of variables `p = r^rho`, `p psi(p) = r^xi chi(r)`, with the
/// centrifugal index `ell` it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub rho: f64,
    pub xi: f64,
    pub ell: f64,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self {
            rho: 2.0,
            xi: 2.5,
            ell: 0.5,
        }
    }
}

impl TransformSpec {
    pub fn centrifugal(&self) -> f64 {
        self.ell * (self.ell + 1.0)
    }

    /// Laguerre index `ell + 1/2` of the oscillator eigenfunctions.
    pub fn alpha(&self) -> f64 {
        self.ell + 0.5
    }
}

pub const MIN_GRID_POINTS: usize = 100;
pub const MIN_BASIS_SIZE: usize = 10;
pub const MAX_LEVELS: usize = 20;
/// Default number of Gauss nodes for matrix elements.
pub const MATRIX_ELEMENT_NODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Central differences on `(0, r_max)` with Dirichlet ends; `r_max = None`
    /// picks a default from the highest requested level.
    Grid { n_points: usize, r_max: Option<f64> },
    /// Rayleigh-Ritz in the lowest `size` oscillator eigenfunctions.
    Basis { size: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Grid { .. } => "grid",
            Method::Basis { .. } => "basis",
        }
    }

    pub fn default_grid() -> Self {
        Method::Grid {
            n_points: 4000,
            r_max: None,
        }
    }

    pub fn default_basis() -> Self {
        Method::Basis { size: 60 }
    }
}

/// The half-line eigenproblem
///
/// ```text
/// -chi'' + ell(ell+1)/r^2 chi + (36 lambda / s^2) r^2 chi - branch (24 / s^(3/2)) r chi = (12/s) eta chi
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub model: TypeIIModel,
    pub branch: Branch,
    pub transform: TransformSpec,
    /// Diagnostic switch: `false` drops the linear term, leaving the radial oscillator.
    pub linear_term: bool,
    pub method: Method,
}

impl RadialProblem {
    pub fn new(model: TypeIIModel, branch: Branch, method: Method) -> Result<Self> {
        if model.s <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "the quantum problem needs s > 0, got s = {}",
                model.s
            )));
        }
        match method {
            Method::Grid { n_points, r_max } => {
                if n_points < MIN_GRID_POINTS {
                    return Err(Error::GridTooCoarse(n_points));
                }
                if let Some(r) = r_max {
                    if !(r.is_finite() && r > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "r_max must be > 0, got {r}"
                        )));
                    }
                }
            }
            Method::Basis { size } => {
                if size < MIN_BASIS_SIZE {
                    return Err(Error::InvalidParameter(format!(
                        "basis size must be at least {MIN_BASIS_SIZE}, got {size}"
                    )));
                }
            }
        }
        Ok(Self {
            model,
            branch,
            transform: TransformSpec::default(),
            linear_term: true,
            method,
        })
    }

    pub fn without_linear_term(mut self) -> Self {
        self.linear_term = false;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// Oscillator frequency `6 sqrt(lambda) / s` of the unperturbed problem.
    pub fn basis_omega(&self) -> f64 {
        6.0 * self.model.lambda.sqrt() / self.model.s
    }

    pub fn harmonic_coefficient(&self) -> f64 {
        36.0 * self.model.lambda / (self.model.s * self.model.s)
    }

    /// Coefficient `c` of the `c r` term, zero when the term is disabled.
    pub fn linear_coefficient(&self) -> f64 {
        if self.linear_term {
            -self.branch.as_real() * 24.0 / self.model.s.powf(1.5)
        } else {
            0.0
        }
    }

    /// Coupling `g = s^(-3/2)` of the perturbation `g V`.
    pub fn coupling(&self) -> f64 {
        self.model.s.powf(-1.5)
    }

    /// Coefficient of `r` in `V = -branch 24 r`, zero when the term is disabled.
    pub fn perturbation_coefficient(&self) -> f64 {
        if self.linear_term {
            -self.branch.as_real() * 24.0
        } else {
            0.0
        }
    }

    pub fn potential(&self, r: f64) -> f64 {
        self.transform.centrifugal() / (r * r)
            + self.harmonic_coefficient() * r * r
            + self.linear_coefficient() * r
    }

    /// Unperturbed eigenvalue `omega (4n + 2 ell + 3)`.
    pub fn unperturbed_energy(&self, n: usize) -> f64 {
        self.basis_omega() * (4.0 * n as f64 + 2.0 * self.transform.ell + 3.0)
    }

    /// `eta = s E / 12`.
    pub fn eta_from_energy(&self, e: f64) -> f64 {
        self.model.s * e / 12.0
    }

    /// Default outer boundary for the lowest `levels` states: past the outer
    /// turning point by six decay lengths, and at least 1.5 times the turning point.
    pub fn default_r_max(&self, levels: usize) -> f64 {
        let w = self.basis_omega();
        let c = self.linear_coefficient().abs();
        let e_top = self.unperturbed_energy(levels.max(1) - 1)
            + c * (self.unperturbed_energy(levels.max(1) - 1)).sqrt() / w;
        // outer root of w^2 r^2 - c r = e_top
        let turning = (c + (c * c + 4.0 * w * w * e_top).sqrt()) / (2.0 * w * w);
        (1.5 * turning).max(turning + 6.0 / w.sqrt())
    }
}

/// Eigenvalues of a radial problem, with `eta = s E / 12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub eta: Vec<f64>,
    pub method: String,
    pub branch: Branch,
    pub s: f64,
    pub lambda: f64,
    pub linear_term: bool,
    /// Per-level estimate of the discretization error in `E`.
    pub convergence_estimate: Vec<f64>,
}

/// Finite-difference operator on `n_points` interior nodes of `(0, r_max)`.
pub fn build_radial_operator(problem: &RadialProblem, r_max: f64) -> Result<SymTridiagonal> {
    let Method::Grid { n_points, .. } = problem.method else {
        return Err(Error::InvalidParameter(
            "finite-difference operator needs the grid method".into(),
        ));
    };
    grid_operator(problem, n_points, r_max)
}

fn grid_operator(problem: &RadialProblem, n_points: usize, r_max: f64) -> Result<SymTridiagonal> {
    if n_points < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse(n_points));
    }
    let h = r_max / (n_points + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let diag = (1..=n_points)
        .map(|i| 2.0 * inv_h2 + problem.potential(i as f64 * h))
        .collect();
    let off = vec![-inv_h2; n_points - 1];
    Ok(SymTridiagonal::new(diag, off))
}

/// Grid nodes `r_i = i h`, `i = 1..=n_points`, for the given boundary.
pub fn grid_nodes(n_points: usize, r_max: f64) -> Vec<f64> {
    let h = r_max / (n_points + 1) as f64;
    (1..=n_points).map(|i| i as f64 * h).collect()
}

/// Relative change between refinements above which a spectrum is rejected.
pub const REFINEMENT_TOLERANCE: f64 = 1e-4;

/// Lowest `count` eigenvalues.
///
/// Grid: one Richardson step between `n` and `2n + 1` interior points (the
/// step halves), plus a check that doubling `r_max` at fixed step leaves the
/// result unchanged. Basis: Rayleigh-Ritz, with the change under a larger
/// basis as the error estimate.
pub fn eigenvalues(problem: &RadialProblem, count: usize) -> Result<Spectrum> {
    if count == 0 || count > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "count must lie in 1..={MAX_LEVELS}, got {count}"
        )));
    }
    let (energies, convergence_estimate) = match problem.method {
        Method::Grid { n_points, r_max } => {
            let r_max = r_max.unwrap_or_else(|| problem.default_r_max(count));
            let coarse = grid_operator(problem, n_points, r_max)?.lowest_eigenvalues(count);
            let fine = grid_operator(problem, 2 * n_points + 1, r_max)?.lowest_eigenvalues(count);
            let wide =
                grid_operator(problem, 4 * n_points + 3, 2.0 * r_max)?.lowest_eigenvalues(count);
            let mut energies = Vec::with_capacity(count);
            let mut estimate = Vec::with_capacity(count);
            for i in 0..count {
                let extrapolated = (4.0 * fine[i] - coarse[i]) / 3.0;
                let boundary_shift = (wide[i] - fine[i]).abs();
                let refinement = (fine[i] - coarse[i]).abs();
                if refinement > REFINEMENT_TOLERANCE * fine[i].abs() {
                    return Err(Error::NotConverged(format!(
                        "grid refinement moved level {i} by {refinement:e} (E = {})",
                        fine[i]
                    )));
                }
                if boundary_shift > REFINEMENT_TOLERANCE * fine[i].abs() {
                    return Err(Error::NotConverged(format!(
                        "doubling r_max moved level {i} by {boundary_shift:e}; increase r_max"
                    )));
                }
                energies.push(extrapolated);
                estimate.push((extrapolated - fine[i]).abs() + boundary_shift);
            }
            (energies, estimate)
        }
        Method::Basis { size } => {
            if count > size {
                return Err(Error::InvalidParameter(format!(
                    "count {count} exceeds basis size {size}"
                )));
            }
            let small = basis_eigen(problem, size)?.values;
            let larger_size = size + (size / 4).max(10);
            let large = basis_eigen(problem, larger_size)?.values;
            let mut estimate = Vec::with_capacity(count);
            for i in 0..count {
                let change = (small[i] - large[i]).abs();
                if change > REFINEMENT_TOLERANCE * small[i].abs() {
                    return Err(Error::NotConverged(format!(
                        "basis enlargement moved level {i} by {change:e}"
                    )));
                }
                estimate.push(change);
            }
            (small[..count].to_vec(), estimate)
        }
    };
    let eta = energies
        .iter()
        .map(|e| problem.eta_from_energy(*e))
        .collect();
    Ok(Spectrum {
        energies,
        eta,
        method: problem.method.name().to_string(),
        branch: problem.branch,
        s: problem.model.s,
        lambda: problem.model.lambda,
        linear_term: problem.linear_term,
        convergence_estimate,
    })
}

/// Hamiltonian matrix in the lowest `size` oscillator states.
pub fn basis_hamiltonian(problem: &RadialProblem, size: usize) -> Result<SymMatrix> {
    let r = r_matrix(problem, size)?;
    let c = problem.linear_coefficient();
    let mut h = SymMatrix::zeros(size);
    for i in 0..size {
        for j in i..size {
            let mut v = c * r.get(i, j);
            if i == j {
                v += problem.unperturbed_energy(i);
            }
            h.set(i, j, v);
        }
    }
    Ok(h)
}

pub(crate) fn basis_eigen(problem: &RadialProblem, size: usize) -> Result<super::dense::SymEigen> {
    Ok(jacobi_eigen(&basis_hamiltonian(problem, size)?))
}

/// Unit-norm normalization constant of the `n`-th oscillator eigenfunction.
pub fn ho_normalization(n: usize, omega: f64, spec: &TransformSpec) -> f64 {
    // int_0^inf r^(2 ell + 2) e^(-w r^2) L_n(w r^2)^2 dr = Gamma(n + a + 1) / (2 n! w^(a+1))
    let a = spec.alpha();
    let ln_norm2 = (2.0f64).ln() + (a + 1.0) * omega.ln() + ln_gamma(n as f64 + 1.0)
        - ln_gamma(n as f64 + a + 1.0);
    (0.5 * ln_norm2).exp()
}

/// `N r^(ell+1) exp(-w r^2 / 2) L_n^(ell + 1/2)(w r^2)` with `w` the basis frequency.
pub fn ho_basis_function(n: usize, problem: &RadialProblem, r: f64) -> f64 {
    let w = problem.basis_omega();
    let spec = &problem.transform;
    ho_normalization(n, w, spec)
        * r.powf(spec.ell + 1.0)
        * (-0.5 * w * r * r).exp()
        * laguerre(n, spec.alpha(), w * r * r)
}

/// Matrix of `<chi_m | r | chi_n>` for `m, n < size`, exact up to rounding.
///
/// In `u = w r^2` the element is `w^(-1/2) int u^(a+1/2) e^-u L_m^(a) L_n^(a) du`
/// over the norms. Expanding `L_m^(a) = sum_j c_(m-j) L_j^(a+1/2)` with
/// `c_i = (-1/2)_i / i!` turns it into
/// `sum_j c_(m-j) c_(n-j) h_j^(a+1/2)`, `h_j^(b) = Gamma(j + b + 1) / j!`.
pub fn r_matrix(problem: &RadialProblem, size: usize) -> Result<SymMatrix> {
    let a = problem.transform.alpha();
    let b = a + 0.5;
    let mut c = vec![1.0; size];
    let mut h_a = vec![gamma(a + 1.0); size];
    let mut h_b = vec![gamma(b + 1.0); size];
    for i in 1..size {
        let fi = i as f64;
        c[i] = c[i - 1] * (fi - 1.5) / fi;
        h_a[i] = h_a[i - 1] * (fi + a) / fi;
        h_b[i] = h_b[i - 1] * (fi + b) / fi;
    }
    let scale = problem.basis_omega().powf(-0.5);
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|m| {
            (m..size)
                .map(|n| {
                    let sum: f64 = (0..=m).map(|j| c[m - j] * c[n - j] * h_b[j]).sum();
                    scale * sum / (h_a[m] * h_a[n]).sqrt()
                })
                .collect()
        })
        .collect();
    let mut out = SymMatrix::zeros(size);
    for (m, row) in rows.iter().enumerate() {
        for (offset, v) in row.iter().enumerate() {
            out.set(m, m + offset, *v);
        }
    }
    Ok(out)
}

/// [`r_matrix`] by Gauss-Laguerre quadrature in `u = w r^2`, checked against
/// a rule with twice the nodes.
pub fn r_matrix_quadrature(problem: &RadialProblem, size: usize) -> Result<SymMatrix> {
    let nodes = MATRIX_ELEMENT_NODES.max(size + 1);
    let base = r_matrix_with_nodes(problem, size, nodes);
    let doubled = r_matrix_with_nodes(problem, size, 2 * nodes);
    for i in 0..size {
        for j in i..size {
            let shift = (base.get(i, j) - doubled.get(i, j)).abs();
            if shift > 1e-10 * base.get(i, i).abs().max(1.0) {
                return Err(Error::QuadratureNotConverged(format!(
                    "<{i}|r|{j}> moved by {shift:e} when doubling {nodes} nodes"
                )));
            }
        }
    }
    Ok(base)
}

fn r_matrix_with_nodes(problem: &RadialProblem, size: usize, nodes: usize) -> SymMatrix {
    let w = problem.basis_omega();
    let spec = &problem.transform;
    let a = spec.alpha();
    // <m|r|n> = N_m N_n w^-(ell+2) / 2 int u^(ell+1) e^-u L_m L_n du
    let rule = gauss_laguerre_cached(nodes, spec.ell + 1.0);
    let tables: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .zip(&rule.sqrt_weights)
        .map(|(&u, &sw)| laguerre_table(size.saturating_sub(1), a, u, sw))
        .collect();
    let prefactor = 0.5 * w.powf(-(spec.ell + 2.0));
    let norms: Vec<f64> = (0..size).map(|n| ho_normalization(n, w, spec)).collect();
    let mut out = SymMatrix::zeros(size);
    for i in 0..size {
        for j in i..size {
            let integral: f64 = tables.iter().map(|t| t[i] * t[j]).sum();
            out.set(i, j, prefactor * norms[i] * norms[j] * integral);
        }
    }
    out
}

/// `<chi_m | r | chi_n>`.
pub fn matrix_element_r(m: usize, n: usize, problem: &RadialProblem) -> Result<f64> {
    Ok(r_matrix_quadrature(problem, m.max(n) + 1)?.get(m, n))
}

/// A function sampled at increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

/// Grid eigenfunction of level `n`, normalized to `int chi^2 dr = 1` and
/// positive near the origin.
pub fn grid_eigenfunction(problem: &RadialProblem, n: usize) -> Result<SampledFunction> {
    let Method::Grid { n_points, r_max } = problem.method else {
        return Err(Error::InvalidParameter(
            "eigenfunctions are sampled on the grid method".into(),
        ));
    };
    let r_max = r_max.unwrap_or_else(|| problem.default_r_max(n + 1));
    let op = grid_operator(problem, n_points, r_max)?;
    let e = op.eigenvalue(n);
    let mut values = op.eigenvector(e);
    let points = grid_nodes(n_points, r_max);
    let h = points[0];
    let scale = 1.0 / h.sqrt();
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(SampledFunction { points, values })
}

/// `psi(p) = r^(xi - rho) chi(r)` at `p = r^rho`.
pub fn reconstruct_momentum_wavefunction(
    chi: &SampledFunction,
    spec: &TransformSpec,
) -> SampledFunction {
    let points = chi.points.iter().map(|r| r.powf(spec.rho)).collect();
    let values = chi
        .points
        .iter()
        .zip(&chi.values)
        .map(|(r, c)| r.powf(spec.xi - spec.rho) * c)
        .collect();
    SampledFunction { points, values }
}

/// Weight `w(p)` with `int chi^2 dr = int psi^2 w(p) dp`:
/// `w = r^(2 (rho - xi)) dr/dp`.
pub fn momentum_weight(p: f64, spec: &TransformSpec) -> f64 {
    let r = p.powf(1.0 / spec.rho);
    r.powf(2.0 * (spec.rho - spec.xi)) * r / (spec.rho * p)
}
