//! Branched Hamiltonians of the cubic Lienard oscillator.
//!
//! * [`model`]: Lagrangians, canonical momenta, velocity branches and branched Hamiltonians.
//! * [`classical`]: trajectories, the nonlocal harmonic transform and conservation audits.
//! * [`quantum`]: the half-line radial eigenproblem by finite differences and oscillator basis.
//! * [`perturbation`]: Rayleigh-Schroedinger series for the same spectrum.
//! * [`cli`]: the `branchon` command-line front end.

pub mod classical;
pub mod cli;
pub mod error;
pub mod model;
pub mod perturbation;
pub mod quantum;

pub use error::{Error, Result};
