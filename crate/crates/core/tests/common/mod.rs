//! Identity checks shared by the property tests and the acceptance suite.
//! Each returns a relative error; callers compare it with their tolerance.

#![allow(dead_code)]

use branchon::model::{
    curtright_hamiltonian, specialized_momentum_shift, split_curtright,
    typei_specialized_hamiltonian, Branch, BranchedSystem, LienardParams, PhasePoint, QuadraticF,
    SpecializedTypeI, StatePoint, TypeIIModel, TypeIModel,
};
use rand::RngExt;

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// `|H - (p v - L)|` over `|p v| + |L|` on the given branch.
pub fn legendre_error<S: BranchedSystem + ?Sized>(sys: &S, x: f64, p: f64, branch: Branch) -> f64 {
    let h = sys
        .hamiltonian(PhasePoint::new(x, p), branch)
        .expect("valid point");
    let v = sys.velocity(x, p, branch).expect("valid point");
    let l = sys.lagrangian(StatePoint::new(x, v)).expect("off the pole");
    rel(h, p * v - l, (p * v).abs() + l.abs())
}

/// Momentum, then inversion on the branch the state lies on. Returns the
/// relative error of the recovered velocity, or `None` when the other branch
/// also reproduces `v` (the inversion would then be ambiguous).
pub fn round_trip_error<S: BranchedSystem + ?Sized>(sys: &S, state: StatePoint) -> Option<f64> {
    let p = sys.momentum(state).expect("off the pole");
    let (vp, vm) = sys
        .velocity_branches(state.x, p)
        .expect("momentum in range");
    let scale = vp.abs() + vm.abs();
    let branch = sys.branch_of(state).expect("off the pole");
    let (hit, miss) = match branch {
        Branch::Plus => (vp, vm),
        Branch::Minus => (vm, vp),
    };
    let err = rel(hit, state.v, scale);
    (rel(miss, state.v, scale) > 1e-6).then_some(err)
}

/// Specialized Hamiltonians against the `m = 0` model at the shifted momentum.
pub fn shift_identity_error(x: f64, p: f64, branch: Branch, params: LienardParams) -> f64 {
    let direct = typei_specialized_hamiltonian(PhasePoint::new(x, p), branch, params).unwrap();
    let model = TypeIModel::specialized(params).unwrap();
    let shifted = specialized_momentum_shift(p, params);
    let via_shift = model
        .hamiltonian(PhasePoint::new(x, shifted), branch)
        .unwrap();
    rel(direct, via_shift, specialized_scale(x, p, params))
}

/// `(1/2) f(p) x^2 + U(p)` against the compact Hamiltonian.
pub fn reassembly_error(x: f64, p: f64, params: LienardParams) -> f64 {
    let (f, u) = split_curtright(p, params).unwrap();
    let h = curtright_hamiltonian(PhasePoint::new(x, p), params).unwrap();
    rel(0.5 * f * x * x + u, h, specialized_scale(x, p, params))
}

/// Sum of the magnitudes of the terms of the specialized Hamiltonian.
fn specialized_scale(x: f64, p: f64, params: LienardParams) -> f64 {
    let (k, lambda) = (params.k, params.lambda);
    let delta = 9.0 * lambda * lambda / (2.0 * k * k);
    let a = 1.0 - 2.0 * k * p / (3.0 * lambda);
    delta * (1.0 + a.abs() * (1.0 + k * k * x * x / (9.0 * lambda)) + 2.0 * a.abs().sqrt())
}

pub fn random_sign<R: RngExt>(rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

pub fn random_branch<R: RngExt>(rng: &mut R) -> Branch {
    if rng.random_bool(0.5) {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

pub fn random_typei<R: RngExt>(rng: &mut R) -> TypeIModel {
    let f = QuadraticF::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    TypeIModel::new(rng.random_range(0.0..0.4), rng.random_range(0.2..4.0), f).unwrap()
}

pub fn random_lienard<R: RngExt>(rng: &mut R) -> LienardParams {
    LienardParams::new(
        random_sign(rng) * rng.random_range(0.5..3.0),
        rng.random_range(0.5..3.0),
    )
    .unwrap()
}

pub fn random_typeii<R: RngExt>(rng: &mut R) -> TypeIIModel {
    TypeIIModel::new(
        random_sign(rng) * rng.random_range(0.3..6.0),
        rng.random_range(0.3..4.0),
    )
    .unwrap()
}

/// Momentum with radicand `1 - 2kp/(3 lambda)` in `[0.01, 4]`.
pub fn random_specialized_momentum<R: RngExt>(rng: &mut R, params: LienardParams) -> f64 {
    let a: f64 = rng.random_range(0.01..4.0);
    (1.0 - a) * 3.0 * params.lambda / (2.0 * params.k)
}

/// Random state at least `margin` away from the pole of `sys`.
pub fn random_state<R: RngExt, S: BranchedSystem + ?Sized>(
    rng: &mut R,
    sys: &S,
    margin: f64,
) -> StatePoint {
    loop {
        let state = StatePoint::new(rng.random_range(-2.0..2.0), rng.random_range(-3.0..3.0));
        if sys.pole_argument(state).abs() > margin {
            return state;
        }
    }
}

/// Worst error over `count` random points for each algebraic identity, as
/// `(name, worst)` pairs.
pub fn identity_sweep<R: RngExt>(rng: &mut R, count: usize) -> Vec<(&'static str, f64)> {
    let mut worst = [0.0f64; 7];
    for _ in 0..count {
        let t1 = random_typei(rng);
        let p = -rng.random_range(0.01..5.0);
        worst[0] = worst[0].max(legendre_error(
            &t1,
            rng.random_range(-2.0..2.0),
            p,
            random_branch(rng),
        ));

        let params = random_lienard(rng);
        let spec = SpecializedTypeI::new(params).unwrap();
        let p = random_specialized_momentum(rng, params);
        let x = rng.random_range(-2.0..2.0);
        worst[1] = worst[1].max(legendre_error(&spec, x, p, random_branch(rng)));

        let t2 = random_typeii(rng);
        let p = t2.s.signum() * rng.random_range(0.01..5.0);
        worst[2] = worst[2].max(legendre_error(
            &t2,
            rng.random_range(-2.0..2.0),
            p,
            random_branch(rng),
        ));

        // the shift needs p' < 0, i.e. a radicand bounded away from zero
        let p = random_specialized_momentum(rng, params);
        worst[3] = worst[3].max(shift_identity_error(x, p, random_branch(rng), params));
        worst[4] = worst[4].max(reassembly_error(x, p, params));

        let mut trip = 0.0f64;
        for sys in [&t1 as &dyn BranchedSystem, &spec, &t2] {
            let state = random_state(rng, sys, 0.05);
            if let Some(e) = round_trip_error(sys, state) {
                trip = trip.max(e);
            }
        }
        worst[5] = worst[5].max(trip);

        let sp = SpecializedTypeI::new(params).unwrap();
        let state = random_state(rng, &sp, 0.05);
        let mirrored = StatePoint::new(-state.x, state.v);
        let h = |s: StatePoint, b| {
            sp.hamiltonian(PhasePoint::new(s.x, sp.momentum(s).unwrap()), b)
                .unwrap()
        };
        worst[6] = worst[6].max((h(state, Branch::Plus) - h(mirrored, Branch::Plus)).abs());
    }
    vec![
        ("legendre type I", worst[0]),
        ("legendre specialized", worst[1]),
        ("legendre type II", worst[2]),
        ("shift identity", worst[3]),
        ("reassembly", worst[4]),
        ("momentum/velocity round trip", worst[5]),
        ("reflection", worst[6]),
    ]
}
