//! Hilbert-space bookkeeping: level schemes, basis catalogs, sparse and dense
//! states, symbolic operators, singlets and the closed `zeta` basis.

mod basis;
mod ket;
mod ops;
mod permutation;
mod singlet;
mod subspace;

pub use basis::{BasisCatalog, BasisLabel, LevelScheme, StateLabel};
pub use ket::{same_catalog, Ket, StateVector};
pub use ops::{fock_lower, fock_raise, tensor_insert, Operator, PhotonOp, ProductOp, Transition};
pub use permutation::permutation_parity;
pub use singlet::{
    antisymmetrized, build_singlet, collective_raising, shifted_singlet, singlet_ket, zeta_basis, zeta_ket,
    zeta_scheme, ShiftedSinglet,
};
pub use subspace::Subspace;
