//! Classical dynamics of the cubic Lienard oscillator.
//!
//! Trajectories are sampled on a uniform output grid; the adaptive integrator
//! lands exactly on every output time, so no interpolation enters the samples.

mod ode;
mod series;
mod transform;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LienardParams, StatePoint};

pub use series::{hamiltonian_series, BranchPolicy, HamiltonianSample, HamiltonianSeries};
pub use transform::{harmonic_residual, nonlocal_transform, HarmonicResidual, TransformSeries};

/// Right-hand side `(x', v')` of `x'' + k x x' + (k^2/9) x^3 + lambda x = 0`.
pub fn lienard_rhs(state: StatePoint, params: LienardParams) -> (f64, f64) {
    let LienardParams { k, lambda } = params;
    let StatePoint { x, v } = state;
    (v, -k * x * v - k * k / 9.0 * x * x * x - lambda * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    /// Adaptive Dormand-Prince 5(4) with PI step control.
    DormandPrince,
    /// Classical RK4 with a fixed number of substeps per output interval.
    Rk4 { substeps: usize },
}

impl IntegratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            IntegratorKind::DormandPrince => "dopri5",
            IntegratorKind::Rk4 { .. } => "rk4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub kind: IntegratorKind,
    /// Local error tolerance, used as both absolute and relative tolerance.
    pub tol: f64,
    /// Output samples per linear period `2 pi / sqrt(lambda)`.
    pub samples_per_period: usize,
    /// `|x|` or `|v|` above this bound aborts the run with [`Error::BlowUp`].
    pub blowup_bound: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            kind: IntegratorKind::DormandPrince,
            tol: 1e-10,
            samples_per_period: 256,
            blowup_bound: 1e9,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-3).contains(&self.tol) {
            return Err(Error::InvalidParameter(format!(
                "tol must lie in [1e-13, 1e-3], got {}",
                self.tol
            )));
        }
        if self.samples_per_period < 200 {
            return Err(Error::InvalidParameter(format!(
                "need at least 200 samples per period, got {}",
                self.samples_per_period
            )));
        }
        if let IntegratorKind::Rk4 { substeps: 0 } = self.kind {
            return Err(Error::InvalidParameter(
                "rk4 substeps must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub integrator: String,
    pub tol: f64,
    pub params: LienardParams,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Sampled solution `(t, x, v)` of the oscillator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StatePoint>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> StatePoint {
        *self
            .states
            .last()
            .expect("trajectory has at least two samples")
    }

    /// Uniform sample spacing, if the grid is uniform to rounding.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }
}

/// Integrate with the default adaptive scheme at tolerance `tol`.
pub fn integrate(
    params: LienardParams,
    initial: StatePoint,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_with(params, initial, t_end, &IntegratorOptions::with_tol(tol))
}

pub fn integrate_with(
    params: LienardParams,
    initial: StatePoint,
    t_end: f64,
    options: &IntegratorOptions,
) -> Result<Trajectory> {
    options.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be > 0, got {t_end}"
        )));
    }
    if !(initial.x.is_finite() && initial.v.is_finite()) {
        return Err(Error::InvalidParameter(
            "initial state must be finite".into(),
        ));
    }

    let period = 2.0 * PI / params.classical_omega();
    let intervals = ((t_end / period) * options.samples_per_period as f64)
        .ceil()
        .max(1.0) as usize;
    let times: Vec<f64> = (0..=intervals)
        .map(|i| t_end * i as f64 / intervals as f64)
        .collect();

    let rhs = |y: &ode::State| {
        let (dx, dv) = lienard_rhs(StatePoint::new(y[0], y[1]), params);
        [dx, dv]
    };
    let check = |t: f64, y: &ode::State| -> Result<()> {
        let bound = options.blowup_bound;
        if !(y[0].abs() <= bound && y[1].abs() <= bound) {
            Err(Error::BlowUp { t, bound })
        } else {
            Ok(())
        }
    };

    let mut states = Vec::with_capacity(times.len());
    states.push(initial);
    let mut y = [initial.x, initial.v];
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    match options.kind {
        IntegratorKind::Rk4 { substeps } => {
            for w in times.windows(2) {
                let h = (w[1] - w[0]) / substeps as f64;
                for _ in 0..substeps {
                    y = ode::rk4_step(&rhs, &y, h);
                    accepted += 1;
                }
                check(w[1], &y)?;
                states.push(StatePoint::new(y[0], y[1]));
            }
        }
        IntegratorKind::DormandPrince => {
            let tol = options.tol;
            let mut controller = ode::PiController::default();
            let mut k1 = rhs(&y);
            let mut h = (times[1] - times[0]) * 0.5;
            let mut t = 0.0;
            for &t_out in &times[1..] {
                while t < t_out {
                    if accepted + rejected >= options.max_steps {
                        return Err(Error::NotConverged(format!(
                            "integrator exceeded {} steps at t = {t}",
                            options.max_steps
                        )));
                    }
                    let remaining = t_out - t;
                    let landing = h >= remaining * (1.0 - 1e-12);
                    let step = if landing { remaining } else { h };
                    let (y_new, k_new, err) = ode::dopri5_step(&rhs, &y, &k1, step);
                    let norm = ode::error_norm(&err, &y, &y_new, tol);
                    if norm.is_finite() && norm <= 1.0 {
                        accepted += 1;
                        t = if landing { t_out } else { t + step };
                        y = y_new;
                        k1 = k_new;
                        check(t, &y)?;
                        let proposed = step * controller.factor(norm, true);
                        // a truncated landing step should not shrink the next one
                        h = if landing { proposed.max(h) } else { proposed };
                    } else {
                        rejected += 1;
                        let fac = if norm.is_finite() {
                            controller.factor(norm, false)
                        } else {
                            0.2
                        };
                        h = step * fac;
                        if h < 1e-14 * t_end {
                            return Err(Error::NotConverged(format!(
                                "step size underflow at t = {t}"
                            )));
                        }
                    }
                }
                states.push(StatePoint::new(y[0], y[1]));
            }
        }
    }

    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            integrator: options.kind.name().to_string(),
            tol: options.tol,
            params,
            accepted_steps: accepted,
            rejected_steps: rejected,
        },
    })
}

/// Closed-form solution of the `k = 0` oscillator.
pub fn harmonic_solution(params: LienardParams, initial: StatePoint, t: f64) -> StatePoint {
    let w = params.classical_omega();
    let (s, c) = (w * t).sin_cos();
    StatePoint::new(
        initial.x * c + initial.v / w * s,
        -initial.x * w * s + initial.v * c,
    )
}
