//! Explicit Runge-Kutta steppers for a two-component autonomous system.
//!
//! The adaptive Dormand-Prince 5(4) pair is used for production runs; the
//! classical fixed-step RK4 is kept as an independent cross-check.

pub type State = [f64; 2];

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

// Dormand-Prince 5(4) tableau; the nodes are unused for an autonomous system.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand-Prince step. `k1` is `f(y)`; returns `(y_new, f(y_new), err)`.
pub(crate) fn dopri5_step<F>(f: &F, y: &State, k1: &State, h: f64) -> (State, State, State)
where
    F: Fn(&State) -> State,
{
    let k2 = f(&axpy(y, h, &[(A21, k1)]));
    let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(&axpy(
        y,
        h,
        &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
    ));
    let k6 = f(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ));
    let y_new = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(&y_new);
    let err = axpy(
        &[0.0, 0.0],
        h,
        &[
            (E1, k1),
            (E3, &k3),
            (E4, &k4),
            (E5, &k5),
            (E6, &k6),
            (E7, &k7),
        ],
    );
    (y_new, k7, err)
}

/// Classical fourth-order Runge-Kutta step.
pub(crate) fn rk4_step<F>(f: &F, y: &State, h: f64) -> State
where
    F: Fn(&State) -> State,
{
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(&axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(
        y,
        h,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    )
}

/// Weighted RMS error norm with `atol = rtol = tol`.
pub(crate) fn error_norm(err: &State, y: &State, y_new: &State, tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let scale = tol + tol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / 2.0).sqrt()
}

/// PI step-size controller (Gustafsson), exponents as in Hairer's DOPRI5.
#[derive(Debug, Clone)]
pub(crate) struct PiController {
    alpha: f64,
    beta: f64,
    safety: f64,
    min_factor: f64,
    max_factor: f64,
    prev_err: f64,
}

impl Default for PiController {
    fn default() -> Self {
        Self {
            alpha: 0.17,
            beta: 0.04,
            safety: 0.9,
            min_factor: 0.2,
            max_factor: 10.0,
            prev_err: 1e-4,
        }
    }
}

impl PiController {
    /// Factor to apply to `h`. Accepted steps update the controller memory.
    pub(crate) fn factor(&mut self, err: f64, accepted: bool) -> f64 {
        let err = err.max(1e-16);
        if accepted {
            let fac = self.safety * err.powf(-self.alpha) * self.prev_err.powf(self.beta);
            self.prev_err = err;
            fac.clamp(self.min_factor, self.max_factor)
        } else {
            (self.safety * err.powf(-self.alpha)).clamp(self.min_factor, 1.0)
        }
    }
}
