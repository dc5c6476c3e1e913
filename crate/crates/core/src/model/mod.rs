//! Pulses, coupling coefficients and the Hamiltonians of the protocol.

mod builders;
mod dark;
mod hamiltonian;
mod params;

pub use builders::{
    build_effective_hamiltonian, build_full_hamiltonian, build_reduced_hamiltonian, compare_hamiltonians,
    effective_terms, full_terms, reduced_analytic, reduced_projection_oracle, REDUCED_ORACLE_TOL,
};
pub use dark::{dark_state, dark_weights};
pub use hamiltonian::{Closure, Hamiltonian, ModelKind, Profile, Term, TermList};
pub use params::{CouplingTable, ModelParams, PulsePair, Pump};
