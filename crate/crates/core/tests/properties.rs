mod common;

use branchon::model::{
    typei_branch_point, typei_specialized_hamiltonian, Branch, BranchedSystem, LienardParams,
    PhasePoint, QuadraticF, SpecializedTypeI, StatePoint, TypeIIModel, TypeIModel,
};
use common::{legendre_error, reassembly_error, round_trip_error, shift_identity_error};
use proptest::prelude::*;

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

fn signed(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

fn lienard() -> impl Strategy<Value = LienardParams> {
    (signed(0.5, 3.0), 0.5..3.0f64).prop_map(|(k, l)| LienardParams::new(k, l).unwrap())
}

fn typei() -> impl Strategy<Value = TypeIModel> {
    (0.0..0.4f64, 0.2..4.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(m, d, a, b)| TypeIModel::new(m, d, QuadraticF::new(a, b)).unwrap())
}

fn typeii() -> impl Strategy<Value = TypeIIModel> {
    (signed(0.3, 6.0), 0.3..4.0f64).prop_map(|(s, l)| TypeIIModel::new(s, l).unwrap())
}

/// Momentum whose specialized radicand lies in `[0.01, 4]`.
fn specialized_p(params: LienardParams, a: f64) -> f64 {
    (1.0 - a) * 3.0 * params.lambda / (2.0 * params.k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn legendre_consistency_typei(model in typei(), x in -2.0..2.0f64, q in 0.01..5.0f64, b in branch()) {
        prop_assert!(legendre_error(&model, x, -q, b) <= 1e-12);
    }

    #[test]
    fn legendre_consistency_specialized(params in lienard(), x in -2.0..2.0f64, a in 0.01..4.0f64, b in branch()) {
        let sys = SpecializedTypeI::new(params).unwrap();
        prop_assert!(legendre_error(&sys, x, specialized_p(params, a), b) <= 1e-12);
    }

    #[test]
    fn legendre_consistency_typeii(model in typeii(), x in -2.0..2.0f64, q in 0.01..5.0f64, b in branch()) {
        prop_assert!(legendre_error(&model, x, model.s.signum() * q, b) <= 1e-12);
    }

    #[test]
    fn round_trip_recovers_velocity(
        t1 in typei(), params in lienard(), t2 in typeii(),
        x in -2.0..2.0f64, v in -3.0..3.0f64,
    ) {
        let spec = SpecializedTypeI::new(params).unwrap();
        let state = StatePoint::new(x, v);
        for sys in [&t1 as &dyn BranchedSystem, &spec, &t2] {
            prop_assume!(sys.pole_argument(state).abs() > 0.05);
            if let Some(err) = round_trip_error(sys, state) {
                prop_assert!(err <= 1e-12, "error {err}");
            }
        }
    }

    #[test]
    fn shift_identity(params in lienard(), x in -2.0..2.0f64, a in 0.01..4.0f64, b in branch()) {
        prop_assert!(shift_identity_error(x, specialized_p(params, a), b, params) <= 1e-12);
    }

    #[test]
    fn reassembly(params in lienard(), x in -2.0..2.0f64, a in 0.01..4.0f64) {
        prop_assert!(reassembly_error(x, specialized_p(params, a), params) <= 1e-12);
    }

    #[test]
    fn hamiltonians_are_even_in_x(
        t1 in typei(), params in lienard(), t2 in typeii(),
        x in -2.0..2.0f64, q in 0.01..5.0f64, a in 0.01..4.0f64, b in branch(),
    ) {
        let even = |sys: &dyn BranchedSystem, p: f64| {
            sys.hamiltonian(PhasePoint::new(x, p), b).unwrap() == sys.hamiltonian(PhasePoint::new(-x, p), b).unwrap()
        };
        prop_assert!(even(&t1, -q));
        prop_assert!(even(&SpecializedTypeI::new(params).unwrap(), specialized_p(params, a)));
        prop_assert!(even(&t2, t2.s.signum() * q));
    }

    #[test]
    fn momentum_sign_facts(t1 in typei(), t2 in typeii(), x in -2.0..2.0f64, v in -3.0..3.0f64) {
        let state = StatePoint::new(x, v);
        if t1.pole_argument(state) != 0.0 {
            prop_assert!(t1.momentum(state).unwrap() < 0.0);
        }
        if t2.pole_argument(state) != 0.0 {
            prop_assert_eq!(t2.momentum(state).unwrap().signum(), t2.s.signum());
        }
    }

    #[test]
    fn branches_meet_at_branch_point(params in lienard(), x in -3.0..3.0f64) {
        // the rounded p* leaves a radicand of a few ulps, whose square root
        // separates the branches by 4 delta sqrt(a)
        let p_star = typei_branch_point(params).unwrap();
        let radicand = (1.0 - 2.0 * params.k * p_star / (3.0 * params.lambda)).abs();
        let delta = 9.0 * params.lambda.powi(2) / (2.0 * params.k.powi(2));
        let plus = typei_specialized_hamiltonian(PhasePoint::new(x, p_star), Branch::Plus, params).unwrap();
        let minus = typei_specialized_hamiltonian(PhasePoint::new(x, p_star), Branch::Minus, params).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-12 * plus.abs().max(1.0) + 4.0 * delta * radicand.sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn typeii_branches_split_strictly(model in typeii(), x in -2.0..2.0f64, q in 0.01..5.0f64) {
        let p = model.s.signum() * q;
        let (vp, vm) = model.velocity_branches(x, p).unwrap();
        let expected = 2.0 / (model.s * p).sqrt();
        prop_assert!(vp > vm);
        prop_assert!(((vp - vm) - expected).abs() <= 1e-12 * (vp.abs() + vm.abs()));
    }

    #[test]
    fn branch_labels_round_trip(b in branch()) {
        prop_assert_eq!(b.as_str().parse::<Branch>().unwrap(), b);
        prop_assert_eq!(b.flip().flip(), b);
        prop_assert_eq!(b.flip().as_real(), -b.as_real());
    }
}
