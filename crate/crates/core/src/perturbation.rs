//! Rayleigh-Schroedinger expansion of the radial spectrum in the coupling
//! `g = s^(-3/2)` of the linear term `g V`, `V = -branch 24 r`.
//!
//! Coefficients come from the sum-over-states recurrence in a truncated
//! oscillator basis with intermediate normalization `<chi_0|chi> = 1`:
//!
//! ```text
//! E_m = <n|V|chi_(m-1)>
//! (E0_n - H0) chi_m = (V chi_(m-1) - sum_(j=1..m) E_j chi_(m-j)) projected off |n>
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Branch;
use crate::quantum::dense::SymMatrix;
use crate::quantum::{eigenvalues, r_matrix, RadialProblem};

pub const MAX_ORDER: usize = 8;
/// Largest truncated basis the doubling audit may reach.
pub const MAX_BASIS: usize = 512;
pub const BASIS_TOLERANCE: f64 = 1e-8;

/// Coefficients `E_m` of `E(g) = sum g^m E_m` for one level and branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSeries {
    pub n: usize,
    pub branch: Branch,
    pub g: f64,
    /// `E_0 .. E_M`.
    pub coefficients: Vec<f64>,
    /// `partial_sums[m] = sum_(j<=m) g^j E_j`.
    pub partial_sums: Vec<f64>,
    /// Ratio-test radius in `g`.
    pub radius_estimate: Option<f64>,
    /// Basis size the coefficients were taken from.
    pub basis_size: usize,
}

impl PerturbationSeries {
    pub fn new(
        n: usize,
        branch: Branch,
        g: f64,
        coefficients: Vec<f64>,
        basis_size: usize,
    ) -> Self {
        let partial_sums = partial_sums(g, &coefficients);
        let radius_estimate = radius_estimate(&coefficients);
        Self {
            n,
            branch,
            g,
            coefficients,
            partial_sums,
            radius_estimate,
            basis_size,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The order-`M` energy.
    pub fn energy(&self) -> f64 {
        *self.partial_sums.last().expect("series has E_0")
    }
}

pub fn partial_sums(g: f64, coefficients: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    coefficients
        .iter()
        .enumerate()
        .map(|(m, e)| {
            acc += g.powi(m as i32) * e;
            acc
        })
        .collect()
}

/// `1 / limsup |E_(m+1) / E_m|`, the limsup taken as the largest ratio over
/// the later half of the available consecutive nonzero pairs. `None` with
/// fewer than four nonzero coefficients or when no usable pair remains.
pub fn radius_estimate(coefficients: &[f64]) -> Option<f64> {
    if coefficients.iter().filter(|e| **e != 0.0).count() < 4 {
        return None;
    }
    let ratios: Vec<f64> = coefficients
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0)
        .map(|w| (w[1] / w[0]).abs())
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let tail = &ratios[ratios.len() / 2..];
    let limsup = tail.iter().copied().fold(0.0f64, f64::max);
    (limsup > 0.0 && limsup.is_finite()).then(|| 1.0 / limsup)
}

/// Sum-over-states coefficients `E_0 ..= E_order` in the lowest `size` oscillator states.
fn coefficients_in_basis(
    n: usize,
    order: usize,
    problem: &RadialProblem,
    r: &SymMatrix,
    size: usize,
) -> Vec<f64> {
    let c = problem.perturbation_coefficient();
    let e0: Vec<f64> = (0..size).map(|k| problem.unperturbed_energy(k)).collect();
    let mut chi: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    let mut unit = vec![0.0; size];
    unit[n] = 1.0;
    chi.push(unit);
    let mut energies = vec![e0[n]];
    for m in 1..=order {
        let prev = &chi[m - 1];
        let v_chi: Vec<f64> = (0..size)
            .map(|i| c * (0..size).map(|j| r.get(i, j) * prev[j]).sum::<f64>())
            .collect();
        energies.push(v_chi[n]);
        let mut next = vec![0.0; size];
        for k in (0..size).filter(|k| *k != n) {
            let mut acc = -v_chi[k];
            for j in 1..=m {
                acc += energies[j] * chi[m - j][k];
            }
            next[k] = acc / (e0[k] - e0[n]);
        }
        chi.push(next);
    }
    energies
}

/// Series for level `n` through order `order`. The basis starts at
/// `4 (n + order)` states and doubles until every coefficient is stable to
/// [`BASIS_TOLERANCE`] relative.
pub fn rspt_coefficients(
    n: usize,
    order: usize,
    problem: &RadialProblem,
) -> Result<PerturbationSeries> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order must be at most {MAX_ORDER}, got {order}"
        )));
    }
    let g = problem.coupling();
    let mut size = (4 * (n + order)).max(n + 2);
    if order == 0 {
        return Ok(PerturbationSeries::new(
            n,
            problem.branch,
            g,
            vec![problem.unperturbed_energy(n)],
            size,
        ));
    }
    loop {
        let doubled = 2 * size;
        if doubled > MAX_BASIS {
            return Err(Error::BasisTooSmall(format!(
                "coefficients of level {n} not stable to {BASIS_TOLERANCE:e} below {MAX_BASIS} basis states"
            )));
        }
        let r = r_matrix(problem, doubled)?;
        let small = coefficients_in_basis(n, order, problem, &r, size);
        let large = coefficients_in_basis(n, order, problem, &r, doubled);
        let floor = f64::EPSILON * large[0].abs();
        let stable = small
            .iter()
            .zip(&large)
            .all(|(a, b)| (a - b).abs() <= BASIS_TOLERANCE * b.abs().max(floor));
        if stable {
            return Ok(PerturbationSeries::new(
                n,
                problem.branch,
                g,
                large,
                doubled,
            ));
        }
        size = doubled;
    }
}

/// Zero-order `eta`, `(sqrt(lambda) / 2) (4n + 2 ell + 3)`; `2n + 2` at `lambda = 1`.
pub fn zero_order_eta(n: usize, problem: &RadialProblem) -> f64 {
    0.5 * problem.model.lambda.sqrt() * (4.0 * n as f64 + 2.0 * problem.transform.ell + 3.0)
}

/// `eta = s E / 12` at each order. The zero-order term is taken in closed
/// form so that it is exact, the corrections as `(s/12) g^m E_m`.
pub fn eta_partial_sums(series: &PerturbationSeries, problem: &RadialProblem) -> Vec<f64> {
    let s = problem.model.s;
    let mut acc = zero_order_eta(series.n, problem);
    let mut out = vec![acc];
    for (m, e) in series.coefficients.iter().enumerate().skip(1) {
        acc += s / 12.0 * series.g.powi(m as i32) * e;
        out.push(acc);
    }
    out
}

pub fn eta_series(n: usize, order: usize, problem: &RadialProblem) -> Result<f64> {
    let series = rspt_coefficients(n, order, problem)?;
    Ok(*eta_partial_sums(&series, problem).last().expect("nonempty"))
}

/// Series against direct diagonalization for one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub n: usize,
    pub branch: Branch,
    pub eta_series: f64,
    pub eta_diag: f64,
    pub abs_diff: f64,
    pub order_used: usize,
}

impl EtaReport {
    pub fn relative_diff(&self) -> f64 {
        self.abs_diff / self.eta_diag.abs()
    }
}

pub fn compare_with_diagonalization(
    n: usize,
    order: usize,
    problem: &RadialProblem,
) -> Result<EtaReport> {
    let eta_series = eta_series(n, order, problem)?;
    let eta_diag = eigenvalues(problem, n + 1)?.eta[n];
    Ok(EtaReport {
        n,
        branch: problem.branch,
        eta_series,
        eta_diag,
        abs_diff: (eta_series - eta_diag).abs(),
        order_used: order,
    })
}

/// Writes `eta_plus = eta_0 + shift - odd` and `eta_minus = eta_0 + shift + odd`.
/// The odd part carries the odd orders, which flip with the branch; the shift
/// carries the even orders, which do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaDecomposition {
    pub n: usize,
    pub order: usize,
    pub eta_zero: f64,
    pub odd_series: f64,
    pub shift_series: f64,
    pub odd_diag: f64,
    pub shift_diag: f64,
}

impl EtaDecomposition {
    pub fn from_reports(plus: &EtaReport, minus: &EtaReport, eta_zero: f64) -> Self {
        Self {
            n: plus.n,
            order: plus.order_used,
            eta_zero,
            odd_series: 0.5 * (minus.eta_series - plus.eta_series),
            shift_series: 0.5 * (minus.eta_series + plus.eta_series) - eta_zero,
            odd_diag: 0.5 * (minus.eta_diag - plus.eta_diag),
            shift_diag: 0.5 * (minus.eta_diag + plus.eta_diag) - eta_zero,
        }
    }
}

/// Both branches of level `n`, compared and decomposed.
pub fn eta_decomposition(
    n: usize,
    order: usize,
    problem: &RadialProblem,
) -> Result<EtaDecomposition> {
    let reports: Vec<EtaReport> = Branch::BOTH
        .par_iter()
        .map(|b| compare_with_diagonalization(n, order, &problem.with_branch(*b)))
        .collect::<Result<_>>()?;
    Ok(EtaDecomposition::from_reports(
        &reports[0],
        &reports[1],
        zero_order_eta(n, problem),
    ))
}
