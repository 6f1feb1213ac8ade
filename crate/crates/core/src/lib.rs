//! Splitting integrators and shadow Hamiltonians for the harmonic
//! oscillator written as a three-variable Nambu system.
//!
//! The symbolic side works with exact rational polynomials in
//! `(x1, x2, x3, h)`: brackets, Liouville fields, the second-order
//! effective generator of a splitting scheme, and the family of shadow
//! Hamiltonian pairs it admits. The numeric side steps the exact shear
//! sub-flows and compares trajectories with closed-form solutions.

pub mod bch;
pub mod brackets;
pub mod cli;
pub mod error;
pub mod fields;
pub mod flows;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod poly;
pub mod scheme;
pub mod verify;

pub use bch::{
    bch_consistency_report, bch_shadow_pair, commutator_expansion, modified_field, representations,
    rewrite_nested_commutator, shadow_solve, verlet_shadow_correction, ModifiedField, RewriteChoice,
    ShadowFamily,
};
pub use brackets::{fundamental_identity_residual, jacobi_residual, nambu, poisson};
pub use error::{Error, Result};
pub use fields::{lv_pair, lv_single, VectorField};
pub use flows::{run, step, FlowParams, State, Trajectory};
pub use model::{Hamiltonians, OscillatorParams};
pub use observables::{conserved_pair, factor_f, ConservedPair, ConservedRegistry};
pub use poly::{Monomial, Poly, Rational, Var};
pub use scheme::{Generator, SplitScheme, Stage};
