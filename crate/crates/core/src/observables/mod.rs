//! Figures of merit: fidelity with the singlet, overlap with the dark state,
//! populations, photon number and the adiabaticity diagnostic.

mod adiabatic;
mod measures;
mod probe;
mod series;

pub use adiabatic::{adiabaticity_report, max_nonadiabaticity, AdiabaticPoint, DEGENERATE_GAP};
pub use measures::{dark_overlap, fidelity, photon_mean, populations, DarkEmbedding, StateRef};
pub use probe::{measure_all, Probe};
pub use series::{format_value, Column, TimeSeries};
