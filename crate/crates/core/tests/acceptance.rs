//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use branchon::classical::{
    hamiltonian_series, harmonic_residual, integrate, nonlocal_transform, BranchPolicy,
};
use branchon::model::{
    typei_branch_point, typei_specialized_hamiltonian, Branch, LienardParams, PhasePoint,
    SpecializedTypeI, StatePoint, TypeIIModel,
};
use branchon::perturbation::{compare_with_diagonalization, eta_series, rspt_coefficients};
use branchon::quantum::special::gamma;
use branchon::quantum::{eigenvalues, matrix_element_r, Method, RadialProblem};
use branchon::Result;
use rand::{rngs::StdRng, RngExt, SeedableRng};

type Criterion = Box<dyn FnOnce(&mut StdRng) -> Result<Outcome>>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn problem(s: f64, lambda: f64, branch: Branch, method: Method) -> RadialProblem {
    RadialProblem::new(TypeIIModel::new(s, lambda).unwrap(), branch, method).unwrap()
}

fn zero_order_spectrum() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for method in [Method::default_grid(), Method::Basis { size: 60 }] {
        let p = problem(6.0, 1.0, Branch::Plus, method).without_linear_term();
        let spec = eigenvalues(&p, 5)?;
        for (n, eta) in spec.eta.iter().enumerate() {
            let exact = 2.0 * n as f64 + 2.0;
            worst = worst.max((eta - exact).abs() / exact);
        }
    }
    outcome(
        worst <= 1e-6,
        format!("worst relative error {worst:.2e} (grid and basis)"),
    )
}

fn zero_order_series() -> Result<Outcome> {
    let mut mismatches = 0;
    for b in Branch::BOTH {
        let p = problem(6.0, 1.0, b, Method::default_basis());
        for n in 0..=10 {
            if eta_series(n, 0, &p)? != 2.0 * n as f64 + 2.0 {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} of 22 values differ from 2n+2"),
    )
}

fn first_order_shift() -> Result<Outcome> {
    let exact = 1.5 * (std::f64::consts::PI / 6.0).sqrt();
    let p = problem(6.0, 1.0, Branch::Plus, Method::default_basis());
    // eta shift = (s/12) g 24 <0|r|0>, and <0|r|0> = Gamma(a + 3/2) / Gamma(a + 1) / sqrt(omega) with a = 1
    let scale = p.model.s / 12.0 * p.coupling() * 24.0;
    let closed = scale * gamma(2.5) / gamma(2.0) / p.basis_omega().sqrt();
    let quadrature = scale * matrix_element_r(0, 0, &p)?;
    let series = (eta_series(0, 1, &p)? - eta_series(0, 0, &p)?).abs();
    let worst = [closed, quadrature, series]
        .iter()
        .map(|v| (v - exact).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-8,
        format!("Gamma {closed:.12}, quadrature {quadrature:.12}, series {series:.12}, exact {exact:.12}"),
    )
}

fn s_invariance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for b in Branch::BOTH {
        let a = eigenvalues(&problem(1.0, 1.0, b, Method::default_basis()), 6)?;
        let c = eigenvalues(&problem(100.0, 1.0, b, Method::default_basis()), 6)?;
        for (x, y) in a.eta.iter().zip(&c.eta) {
            worst = worst.max((x - y).abs() / x.abs());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("worst relative difference {worst:.2e}"),
    )
}

fn series_vs_diagonalization() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for b in Branch::BOTH {
        let report =
            compare_with_diagonalization(0, 4, &problem(1.0, 16.0, b, Method::default_basis()))?;
        worst = worst.max(report.relative_diff());
    }
    outcome(
        worst <= 5e-3,
        format!("worst relative difference {worst:.2e}"),
    )
}

fn reference_trajectory() -> Result<(LienardParams, branchon::classical::Trajectory)> {
    let params = LienardParams::new(1.0, 1.0)?;
    let traj = integrate(params, StatePoint::new(0.1, 0.0), 20.0, 1e-10)?;
    Ok((params, traj))
}

fn transform_identity() -> Result<Outcome> {
    let (params, traj) = reference_trajectory()?;
    let res = harmonic_residual(&nonlocal_transform(&traj, params)?, params.lambda)?;
    outcome(
        res.relative() <= 1e-6,
        format!("max|U''+lambda U| / max|U| = {:.2e}", res.relative()),
    )
}

fn conservation() -> Result<Outcome> {
    let (params, traj) = reference_trajectory()?;
    let sys = SpecializedTypeI::new(params)?;
    let series = hamiltonian_series(&traj, &sys, BranchPolicy::Auto, 1e-12)?;
    let drift = series.relative_drift();
    outcome(drift <= 1e-8, format!("relative drift {drift:.2e}"))
}

fn branch_point(rng: &mut StdRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (k, lambda) in [(1.0, 1.0), (3.0, 1.0), (1.0, 2.0)] {
        let params = LienardParams::new(k, lambda)?;
        let p_star = typei_branch_point(params)?;
        for _ in 0..100 {
            let x = rng.random_range(-3.0..3.0);
            let plus =
                typei_specialized_hamiltonian(PhasePoint::new(x, p_star), Branch::Plus, params)?;
            let minus =
                typei_specialized_hamiltonian(PhasePoint::new(x, p_star), Branch::Minus, params)?;
            worst = worst.max((plus - minus).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |H+ - H-| = {worst:.2e}"))
}

fn identities(rng: &mut StdRng) -> Result<Outcome> {
    let sweep = common::identity_sweep(rng, 1000);
    let pass = sweep.iter().all(|(_, e)| *e <= 1e-12);
    let detail = sweep
        .iter()
        .map(|(name, e)| format!("{name} {e:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn odd_even_structure() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 0..=3 {
        let plus = rspt_coefficients(
            n,
            4,
            &problem(6.0, 1.0, Branch::Plus, Method::default_basis()),
        )?;
        let minus = rspt_coefficients(
            n,
            4,
            &problem(6.0, 1.0, Branch::Minus, Method::default_basis()),
        )?;
        for (m, (a, b)) in plus
            .coefficients
            .iter()
            .zip(&minus.coefficients)
            .enumerate()
        {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((b - sign * a).abs() / a.abs().max(f64::MIN_POSITIVE));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("worst relative mismatch {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("zero-order spectrum", Box::new(|_| zero_order_spectrum())),
        ("zero-order series", Box::new(|_| zero_order_series())),
        ("first-order shift", Box::new(|_| first_order_shift())),
        ("s-invariance", Box::new(|_| s_invariance())),
        (
            "series vs diagonalization",
            Box::new(|_| series_vs_diagonalization()),
        ),
        ("nonlocal transform", Box::new(|_| transform_identity())),
        ("Hamiltonian conservation", Box::new(|_| conservation())),
        ("branch-point coincidence", Box::new(branch_point)),
        ("algebraic identities", Box::new(identities)),
        ("odd/even coefficients", Box::new(|_| odd_even_structure())),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run(&mut rng) {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {}: {name}: {detail} [{secs:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        failures += usize::from(!pass);
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria fail");
        ExitCode::FAILURE
    }
}
