//! Single-mode bosonic states: declarative specs, truncated Fock-basis
//! density matrices, characteristic functions and s-parameterized
//! phase-space distributions.

mod charfn;
mod density;
mod phase_space;
pub mod quadrature;
mod spec;

pub use charfn::{char_fn, CharFn, Provenance};
pub use density::{
    build_density_matrix, build_density_matrix_with_tol, char_fn_from_dm, char_fn_guard,
    displacement_matrix, CMatrix, DensityMatrix, DEFAULT_DIM, TAIL_TOL,
};
pub use phase_space::s_distribution;
pub use quadrature::{s_distribution_quadrature, QuadratureOptions};
pub use spec::{catalog, Component, StateSpec, MAX_NESTING, WEIGHT_SUM_TOL};
