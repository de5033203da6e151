//! The transformed momentum-space Schroedinger problem on the half-line,
//! solved by finite differences and by Rayleigh-Ritz in the radial
//! oscillator basis.

pub mod dense;
pub mod quadrature;
mod radial;
pub mod special;
pub mod tridiag;

pub use radial::{
    basis_hamiltonian, build_radial_operator, eigenvalues, grid_eigenfunction, grid_nodes,
    ho_basis_function, ho_normalization, matrix_element_r, momentum_weight, r_matrix,
    r_matrix_quadrature, reconstruct_momentum_wavefunction, Method, RadialProblem, SampledFunction,
    Spectrum, TransformSpec, MATRIX_ELEMENT_NODES, MAX_LEVELS, MIN_BASIS_SIZE, MIN_GRID_POINTS,
    REFINEMENT_TOLERANCE,
};
pub use special::laguerre;
