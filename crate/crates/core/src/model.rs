//! Parameter records and closed-form branch algebra for the two families of
//! branched Hamiltonians attached to the cubic Lienard oscillator
//!
//! ```text
//! x'' + k x x' + (k^2/9) x^3 + lambda x = 0
//! ```
//!
//! Every Lagrangian here is a non-quadratic function of the velocity, so the
//! velocity-momentum map is two-to-one and each inverse branch `v_plus(p)`,
//! `v_minus(p)` yields its own Hamiltonian through the Legendre transform.
//!
//! Fractional powers of negative reals follow the odd-root convention
//! `z^q = sign(z) |z|^q`, which keeps every branch formula real on its domain.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sign(z) * |z|^q`.
#[inline]
pub fn signed_pow(z: f64, q: f64) -> f64 {
    z.signum() * z.abs().powf(q)
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {value}"
        )))
    }
}

/// Constants `k` and `lambda` of the cubic Lienard oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LienardParams {
    pub k: f64,
    pub lambda: f64,
}

impl LienardParams {
    pub fn new(k: f64, lambda: f64) -> Result<Self> {
        require_finite("k", k)?;
        require_finite("lambda", lambda)?;
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        Ok(Self { k, lambda })
    }

    /// Linear frequency `sqrt(lambda)`.
    pub fn classical_omega(&self) -> f64 {
        self.lambda.sqrt()
    }

    fn require_nonzero_k(&self) -> Result<()> {
        if self.k == 0.0 {
            Err(Error::DegenerateParameter(
                "k = 0: the specialized Type I formulas divide by k".into(),
            ))
        } else {
            Ok(())
        }
    }
}

/// Label of an inverse branch of the velocity-momentum map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn as_real(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" | "p" => Ok(Branch::Plus),
            "minus" | "-" | "m" => Ok(Branch::Minus),
            other => Err(Error::InvalidParameter(format!("unknown branch '{other}'"))),
        }
    }
}

/// A point `(x, p)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }
}

/// A point `(x, v)` of the velocity phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub x: f64,
    pub v: f64,
}

impl StatePoint {
    pub fn new(x: f64, v: f64) -> Self {
        Self { x, v }
    }
}

/// `f(x) = a x^2 + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticF {
    pub a: f64,
    pub b: f64,
}

impl QuadraticF {
    pub const ZERO: QuadraticF = QuadraticF { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn constant(b: f64) -> Self {
        Self { a: 0.0, b }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a * x * x + self.b
    }
}

/// Common surface of a branched Lagrangian system.
pub trait BranchedSystem {
    fn lagrangian(&self, state: StatePoint) -> Result<f64>;

    /// Canonical momentum `dL/dv`.
    fn momentum(&self, state: StatePoint) -> Result<f64>;

    /// The two inverse branches `(v_plus, v_minus)` of the momentum map at `(x, p)`.
    fn velocity_branches(&self, x: f64, p: f64) -> Result<(f64, f64)>;

    fn hamiltonian(&self, point: PhasePoint, branch: Branch) -> Result<f64>;

    /// Signed quantity that vanishes on the pole of the momentum map.
    fn pole_argument(&self, state: StatePoint) -> f64;

    /// Branch on which `state` lies, decided by the sign of the pole argument.
    fn branch_of(&self, state: StatePoint) -> Option<Branch>;

    fn velocity(&self, x: f64, p: f64, branch: Branch) -> Result<f64> {
        let (vp, vm) = self.velocity_branches(x, p)?;
        Ok(match branch {
            Branch::Plus => vp,
            Branch::Minus => vm,
        })
    }

    /// `p v_branch - L(x, v_branch)`, the Legendre transform taken numerically.
    fn legendre_hamiltonian(&self, point: PhasePoint, branch: Branch) -> Result<f64> {
        let v = self.velocity(point.x, point.p, branch)?;
        let l = self.lagrangian(StatePoint::new(point.x, v))?;
        Ok(point.p * v - l)
    }
}

/// Higher-power Lagrangian `L = C (v + f(x))^((2m+1)/(2m-1)) - delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeIModel {
    pub m: f64,
    pub delta: f64,
    pub f: QuadraticF,
}

impl TypeIModel {
    pub fn new(m: f64, delta: f64, f: QuadraticF) -> Result<Self> {
        require_finite("m", m)?;
        require_finite("delta", delta)?;
        require_finite("f.a", f.a)?;
        require_finite("f.b", f.b)?;
        if !(0.0..0.5).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "m must lie in [0, 1/2), got {m}"
            )));
        }
        if delta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "delta must be > 0, got {delta}"
            )));
        }
        Ok(Self { m, delta, f })
    }

    /// The `m = 0` model with `f(x) = (lambda/2) x^2 + 9 lambda^2/(2 k^2)` and
    /// `delta = 9 lambda^2 / (2 k^2)`, the choice tied to the cubic oscillator.
    pub fn specialized(params: LienardParams) -> Result<Self> {
        params.require_nonzero_k()?;
        let delta = specialized_delta(params);
        Self::new(0.0, delta, QuadraticF::new(params.lambda / 2.0, delta))
    }

    /// `C = ((1-2m)/(1+2m)) delta^(2/(1-2m))`, non-negative on the admissible range of `m`.
    pub fn c_constant(&self) -> f64 {
        let m = self.m;
        (1.0 - 2.0 * m) / (1.0 + 2.0 * m) * self.delta.powf(2.0 / (1.0 - 2.0 * m))
    }

    fn z(&self, state: StatePoint) -> Result<f64> {
        let z = state.v + self.f.eval(state.x);
        if z == 0.0 {
            Err(Error::SingularInput(format!(
                "v + f(x) = 0 at x = {}, v = {}",
                state.x, state.v
            )))
        } else {
            Ok(z)
        }
    }

    fn require_negative_p(p: f64) -> Result<()> {
        if p < 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "Type I branches need p < 0, got p = {p}"
            )))
        }
    }
}

impl BranchedSystem for TypeIModel {
    fn lagrangian(&self, state: StatePoint) -> Result<f64> {
        let m = self.m;
        let z = self.z(state)?;
        Ok(self.c_constant() * signed_pow(z, (2.0 * m + 1.0) / (2.0 * m - 1.0)) - self.delta)
    }

    fn momentum(&self, state: StatePoint) -> Result<f64> {
        let m = self.m;
        let z = self.z(state)?;
        // even power of z: always negative momentum
        Ok(-self.delta.powf(2.0 / (1.0 - 2.0 * m)) * z.abs().powf(2.0 / (2.0 * m - 1.0)))
    }

    fn velocity_branches(&self, x: f64, p: f64) -> Result<(f64, f64)> {
        Self::require_negative_p(p)?;
        let shift = self.delta * (-p).powf((2.0 * self.m - 1.0) / 2.0);
        let base = -self.f.eval(x);
        Ok((base + shift, base - shift))
    }

    fn hamiltonian(&self, point: PhasePoint, branch: Branch) -> Result<f64> {
        Self::require_negative_p(point.p)?;
        let m = self.m;
        let root = (-point.p).powf((2.0 * m + 1.0) / 2.0);
        Ok((-point.p) * self.f.eval(point.x)
            - 2.0 * self.delta / (2.0 * m + 1.0) * branch.as_real() * root
            + self.delta)
    }

    fn pole_argument(&self, state: StatePoint) -> f64 {
        state.v + self.f.eval(state.x)
    }

    fn branch_of(&self, state: StatePoint) -> Option<Branch> {
        let z = self.pole_argument(state);
        if z > 0.0 {
            Some(Branch::Plus)
        } else if z < 0.0 {
            Some(Branch::Minus)
        } else {
            None
        }
    }
}

/// Lagrangian `L = (1/s) ((s/3) x^2 + (3/s) lambda - v)^(-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeIIModel {
    pub s: f64,
    pub lambda: f64,
}

impl TypeIIModel {
    pub fn new(s: f64, lambda: f64) -> Result<Self> {
        require_finite("s", s)?;
        require_finite("lambda", lambda)?;
        if s == 0.0 {
            return Err(Error::InvalidParameter("s must be nonzero".into()));
        }
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        Ok(Self { s, lambda })
    }

    /// The model whose Euler-Lagrange equation is the cubic oscillator itself (`s = -k`).
    pub fn for_lienard(params: LienardParams) -> Result<Self> {
        params.require_nonzero_k()?;
        Self::new(-params.k, params.lambda)
    }

    /// `(s/3) x^2 + (3/s) lambda`, the velocity about which both branches are centred.
    fn centre(&self, x: f64) -> f64 {
        self.s * x * x / 3.0 + 3.0 * self.lambda / self.s
    }

    fn bracket(&self, state: StatePoint) -> Result<f64> {
        let b = self.centre(state.x) - state.v;
        if b == 0.0 {
            Err(Error::SingularInput(format!(
                "pole of the Type II Lagrangian at x = {}, v = {}",
                state.x, state.v
            )))
        } else {
            Ok(b)
        }
    }

    fn require_sp_positive(&self, p: f64) -> Result<()> {
        if self.s * p > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "Type II branches need s p > 0, got s = {}, p = {p}",
                self.s
            )))
        }
    }
}

impl BranchedSystem for TypeIIModel {
    fn lagrangian(&self, state: StatePoint) -> Result<f64> {
        Ok(1.0 / (self.s * self.bracket(state)?))
    }

    fn momentum(&self, state: StatePoint) -> Result<f64> {
        let b = self.bracket(state)?;
        Ok(1.0 / (self.s * b * b))
    }

    fn velocity_branches(&self, x: f64, p: f64) -> Result<(f64, f64)> {
        self.require_sp_positive(p)?;
        let centre = self.centre(x);
        let spread = 1.0 / (self.s * p).sqrt();
        Ok((centre + spread, centre - spread))
    }

    /// Closed form of `p v_branch - L`: `(s/3) x^2 p + (3/s) lambda p + branch * 2 p / sqrt(s p)`.
    ///
    /// For `s > 0` the last term is `branch * 2 sqrt(p/s)`; the Plus label is the
    /// `+` root of the velocity inversion.
    fn hamiltonian(&self, point: PhasePoint, branch: Branch) -> Result<f64> {
        self.require_sp_positive(point.p)?;
        let p = point.p;
        Ok(self.centre(point.x) * p + branch.as_real() * 2.0 * p / (self.s * p).sqrt())
    }

    fn pole_argument(&self, state: StatePoint) -> f64 {
        self.centre(state.x) - state.v
    }

    fn branch_of(&self, state: StatePoint) -> Option<Branch> {
        // v = centre - bracket, so a positive bracket is the minus root
        let b = self.pole_argument(state);
        if b > 0.0 {
            Some(Branch::Minus)
        } else if b < 0.0 {
            Some(Branch::Plus)
        } else {
            None
        }
    }
}

/// `delta = 9 lambda^2 / (2 k^2)`.
fn specialized_delta(params: LienardParams) -> f64 {
    9.0 * params.lambda * params.lambda / (2.0 * params.k * params.k)
}

/// `1 - 2 k p / (3 lambda)`, the radicand of the specialized Type I Hamiltonians.
/// A few ulps below zero count as the branch point itself.
fn specialized_radicand(p: f64, params: LienardParams) -> Result<f64> {
    let a = 1.0 - 2.0 * params.k * p / (3.0 * params.lambda);
    let a = if a < 0.0 && a > -4.0 * f64::EPSILON {
        0.0
    } else {
        a
    };
    if a < 0.0 {
        Err(Error::Domain(format!(
            "p = {p} lies past the branch point 3 lambda / (2k) = {}",
            3.0 * params.lambda / (2.0 * params.k)
        )))
    } else {
        Ok(a)
    }
}

/// Specialized, shifted Type I Hamiltonians in `(x, p)` with the branch point at `3 lambda/(2k)`.
pub fn typei_specialized_hamiltonian(
    point: PhasePoint,
    branch: Branch,
    params: LienardParams,
) -> Result<f64> {
    params.require_nonzero_k()?;
    let (k, lambda) = (params.k, params.lambda);
    let (x, p) = (point.x, point.p);
    let a = specialized_radicand(p, params)?;
    let bracket = 2.0 - branch.as_real() * 2.0 * a.sqrt() + k * k * x * x / (9.0 * lambda)
        - 2.0 * k * p / (3.0 * lambda)
        - 2.0 * k * k * k * x * x * p / (27.0 * lambda * lambda);
    Ok(specialized_delta(params) * bracket)
}

/// Compact Hamiltonian of the cubic oscillator, `(1/2) f(p) x^2 + U(p)`
/// written out in full. Coincides with the Plus branch of
/// [`typei_specialized_hamiltonian`].
pub fn curtright_hamiltonian(point: PhasePoint, params: LienardParams) -> Result<f64> {
    params.require_nonzero_k()?;
    let (k, lambda) = (params.k, params.lambda);
    let (x, p) = (point.x, point.p);
    let a = specialized_radicand(p, params)?;
    let pre = 9.0 * lambda * lambda / (2.0 * k * k);
    Ok(pre
        * (2.0 - 2.0 * a.sqrt() + k * k * x * x / (9.0 * lambda)
            - 2.0 * k * p / (3.0 * lambda)
            - 2.0 * k * k * k * x * x * p / (27.0 * lambda * lambda)))
}

/// Split of the compact Hamiltonian into `(f(p), U(p))` with `H = f(p) x^2 / 2 + U(p)`.
pub fn split_curtright(p: f64, params: LienardParams) -> Result<(f64, f64)> {
    params.require_nonzero_k()?;
    let w2 = params.lambda;
    let k = params.k;
    let a = 1.0 - 2.0 * k * p / (3.0 * w2);
    let a = if a < 0.0 && a > -4.0 * f64::EPSILON {
        0.0
    } else {
        a
    };
    if a < 0.0 {
        return Err(Error::Domain(format!(
            "p = {p} lies past 3 omega^2 / (2k) = {}",
            3.0 * w2 / (2.0 * k)
        )));
    }
    let f = w2 * a;
    let u = 9.0 * w2 * w2 / (2.0 * k * k) * (a.sqrt() - 1.0).powi(2);
    Ok((f, u))
}

/// Branch point `p* = 3 lambda / (2k)` where the specialized branches meet.
pub fn typei_branch_point(params: LienardParams) -> Result<f64> {
    params.require_nonzero_k()?;
    Ok(3.0 * params.lambda / (2.0 * params.k))
}

/// Momentum shift `p' = (2k / (3 lambda)) p - 1` taking the specialized
/// Hamiltonians onto the `m = 0` Type I form.
pub fn specialized_momentum_shift(p: f64, params: LienardParams) -> f64 {
    2.0 * params.k / (3.0 * params.lambda) * p - 1.0
}

/// The specialized Type I system as a Lagrangian system in the time of the
/// cubic oscillator.
///
/// Its Lagrangian is
/// `L = (27 lambda^3 / 2k^2) (k v + k^2 x^2 / 3 + 3 lambda)^(-1) + 3 lambda v / (2k) - 9 lambda^2 / (2k^2)`
/// and its Hamiltonians are [`typei_specialized_hamiltonian`]. These are first
/// integrals of the oscillator equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecializedTypeI {
    pub params: LienardParams,
}

impl SpecializedTypeI {
    pub fn new(params: LienardParams) -> Result<Self> {
        params.require_nonzero_k()?;
        Ok(Self { params })
    }

    /// `k v + k^2 x^2 / 3 + 3 lambda`.
    fn kw(&self, state: StatePoint) -> f64 {
        let k = self.params.k;
        k * state.v + k * k * state.x * state.x / 3.0 + 3.0 * self.params.lambda
    }

    fn checked_kw(&self, state: StatePoint) -> Result<f64> {
        let kw = self.kw(state);
        if kw == 0.0 {
            Err(Error::SingularInput(format!(
                "k v + k^2 x^2 / 3 + 3 lambda = 0 at x = {}, v = {}",
                state.x, state.v
            )))
        } else {
            Ok(kw)
        }
    }
}

impl BranchedSystem for SpecializedTypeI {
    fn lagrangian(&self, state: StatePoint) -> Result<f64> {
        let (k, lambda) = (self.params.k, self.params.lambda);
        let kw = self.checked_kw(state)?;
        Ok(
            27.0 * lambda.powi(3) / (2.0 * k * k) / kw + 3.0 * lambda * state.v / (2.0 * k)
                - 9.0 * lambda * lambda / (2.0 * k * k),
        )
    }

    fn momentum(&self, state: StatePoint) -> Result<f64> {
        let (k, lambda) = (self.params.k, self.params.lambda);
        let kw = self.checked_kw(state)?;
        Ok(-27.0 * lambda.powi(3) / (2.0 * k) / (kw * kw) + 3.0 * lambda / (2.0 * k))
    }

    fn velocity_branches(&self, x: f64, p: f64) -> Result<(f64, f64)> {
        let (k, lambda) = (self.params.k, self.params.lambda);
        let a = specialized_radicand(p, self.params)?;
        if a == 0.0 {
            return Err(Error::Domain(format!(
                "velocity is unbounded at the branch point p = {p}"
            )));
        }
        let base = -k * x * x / 3.0 - 3.0 * lambda / k;
        let spread = 3.0 * lambda / (k * a.sqrt());
        Ok((base + spread, base - spread))
    }

    fn hamiltonian(&self, point: PhasePoint, branch: Branch) -> Result<f64> {
        typei_specialized_hamiltonian(point, branch, self.params)
    }

    fn pole_argument(&self, state: StatePoint) -> f64 {
        self.kw(state)
    }

    fn branch_of(&self, state: StatePoint) -> Option<Branch> {
        let kw = self.kw(state);
        if kw > 0.0 {
            Some(Branch::Plus)
        } else if kw < 0.0 {
            Some(Branch::Minus)
        } else {
            None
        }
    }
}
