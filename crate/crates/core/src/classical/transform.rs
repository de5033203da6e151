use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::LienardParams;

/// `U(t) = x(t) exp((k/3) I(t))` with `I(t) = int_0^t x dtau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSeries {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub running_integral: Vec<f64>,
    /// Richardson estimate of the running-integral error (max over samples).
    pub quadrature_error: f64,
}

/// Running integral of `x` by the trapezoid rule with its endpoint
/// derivative correction, `h/2 (x0 + x1) + h^2/12 (v0 - v1)`, which is
/// fourth order on any grid.
fn running_integral(times: &[f64], xs: &[f64], vs: &[f64], stride: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..times.len()).step_by(stride).collect();
    let mut out = Vec::with_capacity(idx.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        let h = times[j] - times[i];
        acc += 0.5 * h * (xs[i] + xs[j]) + h * h / 12.0 * (vs[i] - vs[j]);
        out.push(acc);
    }
    out
}

pub fn nonlocal_transform(traj: &Trajectory, params: LienardParams) -> Result<TransformSeries> {
    if traj.times.len() < 2 || traj.times.len() != traj.states.len() {
        return Err(Error::InvalidParameter(
            "trajectory needs at least two aligned samples".into(),
        ));
    }
    let xs: Vec<f64> = traj.states.iter().map(|s| s.x).collect();
    let vs: Vec<f64> = traj.states.iter().map(|s| s.v).collect();
    let fine = running_integral(&traj.times, &xs, &vs, 1);
    let coarse = running_integral(&traj.times, &xs, &vs, 2);
    // error of the fine rule ~ (I_h - I_2h) / 15 for a fourth-order scheme
    let quadrature_error = coarse
        .iter()
        .enumerate()
        .map(|(j, c)| (fine[2 * j] - c).abs() / 15.0)
        .fold(0.0, f64::max);

    let c = params.k / 3.0;
    let u = xs
        .iter()
        .zip(&fine)
        .map(|(x, i)| x * (c * i).exp())
        .collect();
    Ok(TransformSeries {
        times: traj.times.clone(),
        u,
        running_integral: fine,
        quadrature_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicResidual {
    /// `max |U'' + lambda U|` over interior samples.
    pub max_residual: f64,
    pub max_abs_u: f64,
}

impl HarmonicResidual {
    pub fn relative(&self) -> f64 {
        if self.max_abs_u == 0.0 {
            self.max_residual
        } else {
            self.max_residual / self.max_abs_u
        }
    }
}

/// Residual of `U'' = -lambda U`, with `U''` from centred five-point
/// differences on a uniform grid. The two samples at each end are skipped.
pub fn harmonic_residual(series: &TransformSeries, lambda: f64) -> Result<HarmonicResidual> {
    let n = series.times.len();
    if n < 5 {
        return Err(Error::InvalidParameter("need at least five samples".into()));
    }
    let h = (series.times[n - 1] - series.times[0]) / (n - 1) as f64;
    if series
        .times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h)
    {
        return Err(Error::InvalidParameter(
            "five-point differences need a uniform grid".into(),
        ));
    }
    let u = &series.u;
    let max_residual = (2..n - 2)
        .map(|i| {
            let upp = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2])
                / (12.0 * h * h);
            (upp + lambda * u[i]).abs()
        })
        .fold(0.0, f64::max);
    let max_abs_u = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(HarmonicResidual {
        max_residual,
        max_abs_u,
    })
}
