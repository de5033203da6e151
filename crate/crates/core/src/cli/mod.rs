//! The `branchon` command-line front end.
//!
//! Every run is described by a [`RunConfig`]: a command plus a flat map of
//! keys, taken from an optional `key=value` file and then from flags, flags
//! winning. Output is CSV (with the resolved config echoed as `# key=value`
//! lines) or JSON. Exit status is 0 on success, 2 for configuration errors
//! and 3 when a numerical check fails to converge.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::classical::{
    hamiltonian_series, harmonic_residual, integrate, nonlocal_transform, BranchPolicy, Trajectory,
};
use crate::error::Error;
use crate::model::{
    Branch, BranchedSystem, LienardParams, PhasePoint, QuadraticF, SpecializedTypeI, StatePoint,
    TypeIIModel, TypeIModel,
};
use crate::perturbation::{
    compare_with_diagonalization, eta_partial_sums, rspt_coefficients, zero_order_eta,
    EtaDecomposition,
};
use crate::quantum::{eigenvalues, Method, RadialProblem, MAX_LEVELS};

pub use config::{parse_config_text, CommandName, ParamReader, RunConfig};
pub use output::{Cell, Report};

/// Largest accepted `max |U'' + lambda U| / max |U|` in `transform-check`.
pub const TRANSFORM_CHECK_TOLERANCE: f64 = 1e-6;
/// Samples closer than this to the momentum-map pole abort `hamiltonian`.
pub const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged(_)
            | Error::QuadratureNotConverged(_)
            | Error::BasisTooSmall(_)
            | Error::BlowUp { .. }
            | Error::PoleCrossing { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "branchon",
    version,
    about = "Branched Hamiltonians of the cubic Lienard oscillator"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Pipeline stage to run
    #[arg(value_enum)]
    pub command: CommandName,
    /// key=value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    /// plus, minus, both (spectral commands) or auto (hamiltonian)
    #[arg(long)]
    pub branch: Option<String>,
    /// Level index
    #[arg(long)]
    pub n: Option<String>,
    /// Perturbation order
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long)]
    pub grid_n_points: Option<String>,
    #[arg(long)]
    pub grid_r_max: Option<String>,
    #[arg(long)]
    pub basis_size: Option<String>,
    /// Integrator tolerance
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub t_end: Option<String>,
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long)]
    pub v0: Option<String>,
    /// Momentum at which `branches` evaluates the Hamiltonians
    #[arg(long)]
    pub p: Option<String>,
    /// Number of levels (spectrum) or sample points (branches)
    #[arg(long)]
    pub count: Option<String>,
    /// grid or basis
    #[arg(long)]
    pub method: Option<String>,
    /// specialized, typei or type2
    #[arg(long)]
    pub model: Option<String>,
    /// Drop the linear term of the radial problem
    #[arg(long)]
    pub no_linear_term: bool,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
}

impl Cli {
    /// Merges the config file (if any) with the flags into a [`RunConfig`].
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut pairs = Vec::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            pairs.extend(parse_config_text(&text)?);
        }
        let flags = [
            ("k", self.k),
            ("lambda", self.lambda),
            ("s", self.s),
            ("m", self.m),
            ("delta", self.delta),
            ("branch", self.branch),
            ("n", self.n),
            ("order", self.order),
            ("grid.n_points", self.grid_n_points),
            ("grid.r_max", self.grid_r_max),
            ("basis.size", self.basis_size),
            ("tol", self.tol),
            ("t_end", self.t_end),
            ("x0", self.x0),
            ("v0", self.v0),
            ("p", self.p),
            ("count", self.count),
            ("method", self.method),
            ("model", self.model),
            ("out", self.out),
            ("format", self.format),
        ];
        pairs.extend(
            flags
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
        );
        if self.no_linear_term {
            pairs.push(("no_linear_term".into(), "true".into()));
        }
        RunConfig::new(self.command, pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A resolved run: the report plus where and how to write it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub format: Format,
    pub out: Option<String>,
}

impl RunOutput {
    pub fn encode(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match self.format {
            Format::Csv => self.report.write_csv(&mut buf)?,
            Format::Json => self.report.write_json(&mut buf)?,
        }
        Ok(buf)
    }
}

/// Executes a config and builds its report without writing anything.
pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    let mut r = config.reader();
    let format = match r.choice("format", "csv", &["csv", "json"])?.as_str() {
        "json" => Format::Json,
        _ => Format::Csv,
    };
    let out = r.out();
    let report = match config.command {
        CommandName::Simulate => simulate(r)?,
        CommandName::TransformCheck => transform_check(r)?,
        CommandName::Hamiltonian => hamiltonian(r)?,
        CommandName::Branches => branches(r)?,
        CommandName::Spectrum => spectrum(r)?,
        CommandName::Perturb => perturb(r)?,
        CommandName::Compare => compare(r)?,
    };
    Ok(RunOutput {
        report,
        format,
        out,
    })
}

/// Full run: parse, execute, write. Returns the process exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    let config = cli.into_config()?;
    let output = execute(&config)?;
    let bytes = output.encode()?;
    let summary = output.report.summary_text();
    match &output.out {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            writeln!(stdout, "{summary}  written to {path}")
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => {
            stdout
                .write_all(&bytes)
                .map_err(|e| CliError::Io(e.to_string()))?;
            write!(stderr, "{summary}").map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

/// Honors `BRANCHON_THREADS` by sizing the global rayon pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("BRANCHON_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "BRANCHON_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    // a pool may already exist when several runs share a process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

struct TrajectoryInput {
    params: LienardParams,
    initial: StatePoint,
    t_end: f64,
    tol: f64,
}

fn trajectory_input(r: &mut ParamReader) -> Result<TrajectoryInput, CliError> {
    let k = r.f64("k", 1.0)?;
    let lambda = r.f64("lambda", 1.0)?;
    let x0 = r.f64("x0", 0.1)?;
    let v0 = r.f64("v0", 0.0)?;
    let t_end = r.f64("t_end", 20.0)?;
    let tol = r.f64("tol", 1e-10)?;
    Ok(TrajectoryInput {
        params: LienardParams::new(k, lambda)?,
        initial: StatePoint::new(x0, v0),
        t_end,
        tol,
    })
}

fn run_trajectory(input: &TrajectoryInput) -> Result<Trajectory, CliError> {
    Ok(integrate(
        input.params,
        input.initial,
        input.t_end,
        input.tol,
    )?)
}

fn note_trajectory(report: &mut Report, traj: &Trajectory) {
    let last = traj.last();
    report.note("samples", traj.len());
    report.note("accepted_steps", traj.meta.accepted_steps);
    report.note("rejected_steps", traj.meta.rejected_steps);
    report.note("final_x", last.x);
    report.note("final_v", last.v);
}

fn simulate(mut r: ParamReader) -> Result<Report, CliError> {
    let input = trajectory_input(&mut r)?;
    let config = r.finish()?;
    let traj = run_trajectory(&input)?;
    let mut report = Report::new(CommandName::Simulate, config, vec!["t", "x", "v"]);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        report.push_row(vec![(*t).into(), s.x.into(), s.v.into()]);
    }
    note_trajectory(&mut report, &traj);
    Ok(report)
}

fn transform_check(mut r: ParamReader) -> Result<Report, CliError> {
    let input = trajectory_input(&mut r)?;
    let config = r.finish()?;
    let traj = run_trajectory(&input)?;
    let series = nonlocal_transform(&traj, input.params)?;
    let residual = harmonic_residual(&series, input.params.lambda)?;
    let mut report = Report::new(
        CommandName::TransformCheck,
        config,
        vec!["t", "x", "v", "U", "I"],
    );
    for (i, s) in traj.states.iter().enumerate() {
        report.push_row(vec![
            traj.times[i].into(),
            s.x.into(),
            s.v.into(),
            series.u[i].into(),
            series.running_integral[i].into(),
        ]);
    }
    note_trajectory(&mut report, &traj);
    report.note("max_residual", residual.max_residual);
    report.note("max_abs_u", residual.max_abs_u);
    report.note("relative_residual", residual.relative());
    report.note("quadrature_error", series.quadrature_error);
    // NaN must fail too
    if residual.relative().is_nan() || residual.relative() > TRANSFORM_CHECK_TOLERANCE {
        return Err(CliError::Numerical(format!(
            "harmonic identity: max|U'' + lambda U| / max|U| = {:e} exceeds {TRANSFORM_CHECK_TOLERANCE:e}",
            residual.relative()
        )));
    }
    Ok(report)
}

fn hamiltonian(mut r: ParamReader) -> Result<Report, CliError> {
    let input = trajectory_input(&mut r)?;
    let model = r.choice("model", "specialized", &["specialized", "type2"])?;
    let policy = match r
        .choice("branch", "auto", &["auto", "plus", "minus"])?
        .as_str()
    {
        "plus" => BranchPolicy::Fixed(Branch::Plus),
        "minus" => BranchPolicy::Fixed(Branch::Minus),
        _ => BranchPolicy::Auto,
    };
    let config = r.finish()?;
    let system: Box<dyn BranchedSystem> = match model.as_str() {
        "type2" => Box::new(TypeIIModel::for_lienard(input.params)?),
        _ => Box::new(SpecializedTypeI::new(input.params)?),
    };
    let traj = run_trajectory(&input)?;
    let series = hamiltonian_series(&traj, system.as_ref(), policy, POLE_EPS)?;
    let mut report = Report::new(
        CommandName::Hamiltonian,
        config,
        vec!["t", "x", "v", "p", "H", "branch"],
    );
    for s in &series.samples {
        report.push_row(vec![
            s.t.into(),
            s.x.into(),
            s.v.into(),
            s.p.into(),
            s.h.into(),
            s.branch.as_str().into(),
        ]);
    }
    note_trajectory(&mut report, &traj);
    report.note("drift", series.drift());
    report.note("relative_drift", series.relative_drift());
    report.note("branch_switches", series.branch_switches());
    Ok(report)
}

fn branches(mut r: ParamReader) -> Result<Report, CliError> {
    let model = r.choice("model", "specialized", &["specialized", "typei", "type2"])?;
    let (system, default_p): (Box<dyn BranchedSystem>, f64) = match model.as_str() {
        "typei" => {
            let m = r.f64("m", 0.0)?;
            let delta = r.f64("delta", 1.0)?;
            let lambda = r.f64("lambda", 1.0)?;
            (
                Box::new(TypeIModel::new(
                    m,
                    delta,
                    QuadraticF::new(lambda / 2.0, delta),
                )?),
                -1.0,
            )
        }
        "type2" => {
            let s = r.f64("s", 6.0)?;
            let lambda = r.f64("lambda", 1.0)?;
            (Box::new(TypeIIModel::new(s, lambda)?), s.signum())
        }
        _ => {
            let k = r.f64("k", 1.0)?;
            let lambda = r.f64("lambda", 1.0)?;
            let params = LienardParams::new(k, lambda)?;
            // halfway to the branch point 3 lambda / (2k)
            (Box::new(SpecializedTypeI::new(params)?), 0.75 * lambda / k)
        }
    };
    let p = r.f64("p", default_p)?;
    let x_max = r.f64("x0", 1.0)?.abs();
    let count = r.usize("count", 11)?;
    let config = r.finish()?;
    if count == 0 {
        return Err(CliError::Config("count must be positive".into()));
    }
    let mut report = Report::new(
        CommandName::Branches,
        config,
        vec!["x", "p", "v_plus", "v_minus", "H_plus", "H_minus"],
    );
    let mut gap = 0.0f64;
    for i in 0..count {
        let x = if count == 1 {
            x_max
        } else {
            -x_max + 2.0 * x_max * i as f64 / (count - 1) as f64
        };
        let (vp, vm) = system.velocity_branches(x, p)?;
        let hp = system.hamiltonian(PhasePoint::new(x, p), Branch::Plus)?;
        let hm = system.hamiltonian(PhasePoint::new(x, p), Branch::Minus)?;
        gap = gap.max((hp - hm).abs());
        report.push_row(vec![
            x.into(),
            p.into(),
            vp.into(),
            vm.into(),
            hp.into(),
            hm.into(),
        ]);
    }
    report.note("max_branch_gap", gap);
    Ok(report)
}

fn branch_list(r: &mut ParamReader, default: &str) -> Result<Vec<Branch>, CliError> {
    Ok(
        match r
            .choice("branch", default, &["plus", "minus", "both"])?
            .as_str()
        {
            "plus" => vec![Branch::Plus],
            "minus" => vec![Branch::Minus],
            _ => Branch::BOTH.to_vec(),
        },
    )
}

/// Reads `s`, `lambda`, the method keys that apply and `no_linear_term`.
fn radial_problem(r: &mut ParamReader, with_method: bool) -> Result<RadialProblem, CliError> {
    let s = r.f64("s", 6.0)?;
    let lambda = r.f64("lambda", 1.0)?;
    let method = if with_method {
        match r.choice("method", "basis", &["basis", "grid"])?.as_str() {
            "grid" => Method::Grid {
                n_points: r.usize("grid.n_points", 4000)?,
                r_max: r.opt_f64("grid.r_max")?,
            },
            _ => Method::Basis {
                size: r.usize("basis.size", 60)?,
            },
        }
    } else {
        Method::default_basis()
    };
    let linear = !r.flag("no_linear_term")?;
    let problem = RadialProblem::new(TypeIIModel::new(s, lambda)?, Branch::Plus, method)?;
    Ok(if linear {
        problem
    } else {
        problem.without_linear_term()
    })
}

fn spectrum(mut r: ParamReader) -> Result<Report, CliError> {
    let problem = radial_problem(&mut r, true)?;
    let branches = branch_list(&mut r, "plus")?;
    let count = r.usize("count", 5)?;
    let config = r.finish()?;
    if count == 0 || count > MAX_LEVELS {
        return Err(CliError::Config(format!(
            "count must lie in 1..={MAX_LEVELS}"
        )));
    }
    let mut report = Report::new(
        CommandName::Spectrum,
        config,
        vec!["n", "E", "eta", "branch", "method", "conv_est"],
    );
    for b in branches {
        let spec = eigenvalues(&problem.with_branch(b), count)?;
        for i in 0..count {
            report.push_row(vec![
                i.into(),
                spec.energies[i].into(),
                spec.eta[i].into(),
                b.as_str().into(),
                spec.method.as_str().into(),
                spec.convergence_estimate[i].into(),
            ]);
        }
    }
    Ok(report)
}

fn perturb(mut r: ParamReader) -> Result<Report, CliError> {
    let problem = radial_problem(&mut r, false)?;
    let branches = branch_list(&mut r, "plus")?;
    let n = r.usize("n", 0)?;
    let order = r.usize("order", 4)?;
    let config = r.finish()?;
    let mut report = Report::new(
        CommandName::Perturb,
        config,
        vec!["n", "branch", "m", "E_m", "partial_sum", "eta"],
    );
    for b in branches {
        let p = problem.with_branch(b);
        let series = rspt_coefficients(n, order, &p)?;
        let etas = eta_partial_sums(&series, &p);
        for (m, ((e, sum), eta)) in series
            .coefficients
            .iter()
            .zip(&series.partial_sums)
            .zip(&etas)
            .enumerate()
        {
            report.push_row(vec![
                n.into(),
                b.as_str().into(),
                m.into(),
                (*e).into(),
                (*sum).into(),
                (*eta).into(),
            ]);
        }
        report.note(&format!("g_{b}"), series.g);
        report.note(&format!("radius_estimate_{b}"), series.radius_estimate);
        report.note(&format!("basis_size_{b}"), series.basis_size);
    }
    Ok(report)
}

fn compare(mut r: ParamReader) -> Result<Report, CliError> {
    let problem = radial_problem(&mut r, true)?;
    let branches = branch_list(&mut r, "both")?;
    let n = r.usize("n", 0)?;
    let order = r.usize("order", 4)?;
    let config = r.finish()?;
    let mut report = Report::new(
        CommandName::Compare,
        config,
        vec![
            "n",
            "branch",
            "order",
            "eta_series",
            "eta_diag",
            "abs_diff",
            "rel_diff",
        ],
    );
    let mut reports = Vec::new();
    for b in &branches {
        let rep = compare_with_diagonalization(n, order, &problem.with_branch(*b))?;
        report.push_row(vec![
            n.into(),
            b.as_str().into(),
            order.into(),
            rep.eta_series.into(),
            rep.eta_diag.into(),
            rep.abs_diff.into(),
            rep.relative_diff().into(),
        ]);
        reports.push(rep);
    }
    if let [plus, minus] = reports.as_slice() {
        let d = EtaDecomposition::from_reports(plus, minus, zero_order_eta(n, &problem));
        report.note("eta_zero", d.eta_zero);
        report.note("odd_series", d.odd_series);
        report.note("odd_diag", d.odd_diag);
        report.note("shift_series", d.shift_series);
        report.note("shift_diag", d.shift_diag);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["branchon"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["simulate", "--k", "0", "--t-end", "1"]).0, 0);
        assert_eq!(run_args(&["simulate", "--s", "3"]).0, 2);
        assert_eq!(run_args(&["spectrum", "--lambda", "abc"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(
            run_args(&["spectrum", "--method", "basis", "--grid-n-points", "500"]).0,
            2
        );
        let (code, _, err) = run_args(&[
            "spectrum",
            "--method",
            "grid",
            "--grid-n-points",
            "2000",
            "--grid-r-max",
            "3",
        ]);
        assert_eq!(code, 3, "{err}");
        assert!(err.contains("r_max"), "{err}");
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, err) = run_args(&["simulate", "--x0", "-0.2", "--t-end", "0.5"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("# x0=-0.2"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(
            CliError::from(Error::BasisTooSmall("x".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(Error::InvalidParameter("x".into())).exit_code(),
            2
        );
    }
}
