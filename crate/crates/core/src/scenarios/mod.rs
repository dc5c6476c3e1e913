//! Named experiments and the sweep engine.

mod named;
mod params;
mod protocol;
mod sweep;

pub use named::{
    decay_drop_tolerance, dissipative_solver, elimination_point, reference_decay_endpoints, reference_endpoint,
    run_scenario, scenario_defaults, scenario_elimination, scenario_feasibility, scenario_fig3, scenario_fig4,
    scenario_fig5, scenario_fig5_on, sweep_base, CheckKind, EliminationPoint, ScenarioReport, TargetCheck, ELIMINATION_DETUNINGS,
    FEASIBILITY_GAMMA, FEASIBILITY_KAPPA, FIG4_WIDTHS, FIG5_KAPPAS, REFERENCE_TOL, SCENARIOS,
};
pub use params::{ModelChoice, ProtocolParams, SolverChoice, REAL_AXES};
pub use protocol::{assumptions, run_protocol, FinalState, ProtocolRun, ProtocolSetup};
pub use sweep::{run_sweep, SweepPoint, SweepResult, SweepSpec};
