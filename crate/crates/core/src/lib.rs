//! Simulation of the adiabatic-passage protocol that prepares `N`-party,
//! `N`-level singlet states of atoms coupled to a single cavity mode.
//!
//! The crate is organized bottom-up:
//!
//! * [`qspace`]: bases, singlet construction and the closed `zeta` subspace.
//! * [`model`]: the Gaussian pulse pair, coupling coefficients and the full,
//!   effective and reduced Hamiltonians, plus the analytic dark state.
//! * [`dynamics`]: Schrödinger, Lindblad and quantum-jump integrators and
//!   closure of a seed set into an invariant span.
//! * [`observables`]: fidelity, dark-state overlap, populations and the
//!   adiabaticity diagnostic.
//! * [`scenarios`]: named experiments and the sweep engine.
//!
//! All frequencies are in units of the pulse amplitude `Omega0` and times in
//! units of `1/Omega0`.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod qspace;
pub mod scenarios;

pub use error::{Error, Result};
pub use linalg::C64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/singlets.md")]
    mod singlets {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    mod hamiltonians {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
