//! Time evolution: Schrödinger propagation, the Lindblad master equation,
//! quantum-jump trajectories and closure of seed states into an invariant
//! span for dissipative runs.

mod density;
mod integrator;
mod lindblad;
mod mcwf;
mod reachable;
mod schrodinger;

pub use density::DensityMatrix;
pub use integrator::{integrate, IntegratorConfig, Method, Rhs, StepStats};
pub use lindblad::{evolve_lindblad, JumpOperator, LEAKAGE_TOL, POSITIVITY_TOL};
pub use mcwf::{mcwf_trajectories, trajectory_rng, McwfConfig, McwfOutcome, CHUNK};
pub use reachable::{reachable_basis, INDEPENDENCE_TOL};
pub use schrodinger::{propagate_schrodinger, Diagnostics, Evolution, FULL_MODEL_STEP};
