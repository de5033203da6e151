use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::{Branch, BranchedSystem, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPolicy {
    Fixed(Branch),
    /// Pick the branch on which each sample lies, from the sign of the pole argument.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub p: f64,
    pub h: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSeries {
    pub samples: Vec<HamiltonianSample>,
}

impl HamiltonianSeries {
    /// `max |H(t) - H(0)|`.
    pub fn drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| (s.h - first.h).abs())
            .fold(0.0, f64::max)
    }

    /// Drift relative to `|H(0)|`; absolute when `H(0) = 0`.
    pub fn relative_drift(&self) -> f64 {
        match self.samples.first() {
            Some(first) if first.h != 0.0 => self.drift() / first.h.abs(),
            _ => self.drift(),
        }
    }

    /// Number of times the branch label changes along the series.
    pub fn branch_switches(&self) -> usize {
        self.samples
            .windows(2)
            .filter(|w| w[0].branch != w[1].branch)
            .count()
    }
}

/// Canonical momentum and branched Hamiltonian along a trajectory.
///
/// A sample within `pole_eps` of the momentum-map pole is an error rather
/// than being assigned to either branch.
pub fn hamiltonian_series<S>(
    traj: &Trajectory,
    system: &S,
    policy: BranchPolicy,
    pole_eps: f64,
) -> Result<HamiltonianSeries>
where
    S: BranchedSystem + ?Sized,
{
    let mut samples = Vec::with_capacity(traj.len());
    for (index, (&t, &state)) in traj.times.iter().zip(&traj.states).enumerate() {
        if system.pole_argument(state).abs() < pole_eps {
            return Err(Error::PoleCrossing {
                index,
                t,
                eps: pole_eps,
            });
        }
        let branch = match policy {
            BranchPolicy::Fixed(b) => b,
            BranchPolicy::Auto => system.branch_of(state).ok_or(Error::PoleCrossing {
                index,
                t,
                eps: pole_eps,
            })?,
        };
        let p = system.momentum(state)?;
        let h = system.hamiltonian(PhasePoint::new(state.x, p), branch)?;
        samples.push(HamiltonianSample {
            t,
            x: state.x,
            v: state.v,
            p,
            h,
            branch,
        });
    }
    Ok(HamiltonianSeries { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{integrate, TrajectoryMeta};
    use crate::model::{LienardParams, SpecializedTypeI, StatePoint, TypeIIModel};

    fn constant_trajectory(state: StatePoint) -> Trajectory {
        let params = LienardParams::new(1.0, 1.0).unwrap();
        Trajectory {
            times: vec![0.0, 0.5, 1.0],
            states: vec![state; 3],
            meta: TrajectoryMeta {
                integrator: "none".into(),
                tol: 0.0,
                params,
                accepted_steps: 0,
                rejected_steps: 0,
            },
        }
    }

    #[test]
    fn equilibrium_typeii_is_constant() {
        let model = TypeIIModel::new(1.0, 1.0).unwrap();
        let traj = constant_trajectory(StatePoint::new(0.0, 0.0));
        let series = hamiltonian_series(&traj, &model, BranchPolicy::Auto, 1e-8).unwrap();
        assert!(series
            .samples
            .iter()
            .all(|s| (s.p - 1.0 / 9.0).abs() < 1e-15));
        assert_eq!(series.drift(), 0.0);
    }

    #[test]
    fn pole_proximity_is_flagged() {
        let model = TypeIIModel::new(1.0, 1.0).unwrap();
        let traj = constant_trajectory(StatePoint::new(0.0, 3.0 - 1e-10));
        let err = hamiltonian_series(&traj, &model, BranchPolicy::Auto, 1e-8).unwrap_err();
        assert!(matches!(err, Error::PoleCrossing { index: 0, .. }));
    }

    #[test]
    fn specialized_hamiltonian_is_conserved() {
        let params = LienardParams::new(1.0, 1.0).unwrap();
        let traj = integrate(params, StatePoint::new(0.1, 0.0), 20.0, 1e-10).unwrap();
        let sys = SpecializedTypeI::new(params).unwrap();
        let series = hamiltonian_series(&traj, &sys, BranchPolicy::Auto, 1e-8).unwrap();
        assert!(
            series.relative_drift() <= 1e-8,
            "drift {}",
            series.relative_drift()
        );
        assert_eq!(series.branch_switches(), 0);
    }

    #[test]
    fn typeii_hamiltonian_is_conserved_for_s_equal_minus_k() {
        let params = LienardParams::new(1.0, 1.0).unwrap();
        let traj = integrate(params, StatePoint::new(0.1, 0.0), 20.0, 1e-10).unwrap();
        let model = TypeIIModel::for_lienard(params).unwrap();
        let series = hamiltonian_series(&traj, &model, BranchPolicy::Auto, 1e-8).unwrap();
        assert!(
            series.relative_drift() <= 1e-8,
            "drift {}",
            series.relative_drift()
        );
    }

    #[test]
    fn fixed_wrong_branch_is_not_conserved() {
        let params = LienardParams::new(1.0, 1.0).unwrap();
        let traj = integrate(params, StatePoint::new(0.5, 0.0), 10.0, 1e-10).unwrap();
        let sys = SpecializedTypeI::new(params).unwrap();
        let series =
            hamiltonian_series(&traj, &sys, BranchPolicy::Fixed(Branch::Minus), 1e-8).unwrap();
        assert!(series.relative_drift() > 1e-4);
    }
}
