use std::sync::Arc;

use serde_json::{json, Value};

use super::params::{ModelChoice, ProtocolParams, SolverChoice};
use crate::dynamics::{
    evolve_lindblad, mcwf_trajectories, propagate_schrodinger, reachable_basis, DensityMatrix, Diagnostics,
    IntegratorConfig, JumpOperator, McwfConfig, LEAKAGE_TOL,
};
use crate::error::{Error, Result};
use crate::model::{build_effective_hamiltonian, build_full_hamiltonian, build_reduced_hamiltonian, effective_terms, Hamiltonian, ModelParams};
use crate::observables::{DarkEmbedding, Probe, TimeSeries};
use crate::qspace::{build_singlet, singlet_ket, zeta_basis, zeta_ket, Operator, PhotonOp, ProductOp, StateLabel, StateVector};

/// Rounds allowed when closing the `zeta` states under the model and decay.
const CLOSURE_ROUNDS: usize = 200;

/// Everything needed to integrate one configuration.
#[derive(Clone, Debug)]
pub struct ProtocolSetup {
    pub model: ModelParams,
    pub hamiltonian: Hamiltonian,
    pub jumps: Vec<JumpOperator>,
    /// `|zeta_{0,N}>`: first atom in `g_{N-1}`, the rest in the singlet of
    /// levels `0..N-2`, cavity empty.
    pub initial: StateVector,
    pub target: StateVector,
    pub embedding: Arc<DarkEmbedding>,
    /// How the basis was obtained, for the run metadata.
    pub basis_note: &'static str,
}

impl ProtocolSetup {
    pub fn new(p: &ProtocolParams) -> Result<Self> {
        p.validate()?;
        let model = p.model_params()?;
        let n = p.n;
        let dissipative = p.kappa > 0.0;
        match p.model {
            ModelChoice::Reduced if !dissipative => {
                let zeta = zeta_basis(n)?;
                let h = if p.compensated {
                    build_reduced_hamiltonian(&model)?
                } else {
                    let zp = ModelParams {
                        photon_cutoff: n - 1,
                        ..model.clone()
                    };
                    let h = effective_terms(&zp, false)?.project(&zeta)?;
                    check_leakage(&h)?;
                    h
                };
                let catalog = h.basis().clone();
                let target = StateVector::new(catalog.clone(), zeta.restrict(&singlet_ket(n)?).into_amplitudes())?;
                Ok(Self {
                    initial: StateVector::from_label(catalog.clone(), &StateLabel::Zeta { j: 0, m: n })?,
                    target,
                    embedding: Arc::new(DarkEmbedding::on_zeta(n, &catalog)?),
                    hamiltonian: h,
                    jumps: Vec::new(),
                    model,
                    basis_note: "zeta basis",
                })
            }
            ModelChoice::Reduced => {
                let terms = effective_terms(&model, p.compensated)?;
                let mut generators = terms.generators();
                generators.push(Operator::single(ProductOp::photon_only(PhotonOp::Annihilate)));
                let zeta = zeta_basis(n)?;
                let span = reachable_basis(&terms.scheme, zeta.vectors(), &generators, CLOSURE_ROUNDS)?;
                let h = terms.project(&span)?;
                check_leakage(&h)?;
                Ok(Self {
                    initial: span.restrict(&zeta_ket(n, 0, n)?),
                    target: span.restrict(&singlet_ket(n)?),
                    embedding: Arc::new(DarkEmbedding::on_subspace(n, &span)?),
                    jumps: vec![JumpOperator::cavity_decay_on(p.kappa, &span)?],
                    hamiltonian: h,
                    model,
                    basis_note: "span of the zeta states closed under the effective model and cavity decay",
                })
            }
            ModelChoice::Effective | ModelChoice::Full => {
                let h = if p.model == ModelChoice::Full {
                    build_full_hamiltonian(&model)?
                } else {
                    build_effective_hamiltonian(&model, p.compensated)?
                };
                let catalog = h.basis().clone();
                let jumps = if dissipative {
                    vec![JumpOperator::cavity_decay(p.kappa, &catalog)?]
                } else {
                    Vec::new()
                };
                Ok(Self {
                    initial: StateVector::from_ket(&zeta_ket(n, 0, n)?, catalog.clone())?,
                    target: build_singlet(n, &catalog)?,
                    embedding: Arc::new(DarkEmbedding::on_product(n, &catalog)?),
                    hamiltonian: h,
                    jumps,
                    model,
                    basis_note: "product basis",
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Fidelity, dark-state overlap, trace and mean photon number.
    pub fn standard_probes(&self) -> Vec<Probe> {
        vec![
            Probe::fidelity(self.target.clone()),
            Probe::dark_overlap(&self.model, self.embedding.clone()),
            Probe::Trace,
            Probe::PhotonMean,
        ]
    }
}

fn check_leakage(h: &Hamiltonian) -> Result<()> {
    if h.leakage() > LEAKAGE_TOL {
        return Err(Error::BasisNotClosed {
            leakage: h.leakage(),
            tolerance: LEAKAGE_TOL,
        });
    }
    Ok(())
}

/// Final state of a run.
#[derive(Clone, Debug)]
pub enum FinalState {
    Pure(StateVector),
    Mixed(DensityMatrix),
    /// Trajectory ensembles keep only averaged observables.
    Ensemble,
}

#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub params: ProtocolParams,
    pub solver: SolverChoice,
    pub basis_dim: usize,
    pub series: TimeSeries,
    pub final_fidelity: f64,
    /// Standard error of the final fidelity for trajectory runs.
    pub fidelity_se: Option<f64>,
    /// `|F(dt) - F(dt/2)|` at the end of the run, when checked.
    pub convergence: Option<f64>,
    pub diagnostics: Diagnostics,
    pub final_state: FinalState,
}

struct Outcome {
    series: TimeSeries,
    fidelity: f64,
    se: Option<f64>,
    diagnostics: Diagnostics,
    state: FinalState,
}

fn solve(setup: &ProtocolSetup, p: &ProtocolParams, cfg: &IntegratorConfig, probes: &[Probe]) -> Result<Outcome> {
    let h = &setup.hamiltonian;
    let last = |s: &TimeSeries, name: &str| s.last(name).unwrap_or(f64::NAN);
    Ok(match p.resolved_solver() {
        SolverChoice::Schrodinger => {
            let ev = propagate_schrodinger(h, &setup.initial, cfg, probes)?;
            Outcome {
                fidelity: last(&ev.series, "fidelity"),
                se: None,
                series: ev.series,
                diagnostics: ev.diagnostics,
                state: FinalState::Pure(ev.final_state),
            }
        }
        SolverChoice::Lindblad => {
            let ev = evolve_lindblad(h, &setup.jumps, &DensityMatrix::from_pure(&setup.initial), cfg, probes)?;
            Outcome {
                fidelity: last(&ev.series, "fidelity"),
                se: None,
                series: ev.series,
                diagnostics: ev.diagnostics,
                state: FinalState::Mixed(ev.final_state),
            }
        }
        SolverChoice::Mcwf | SolverChoice::Auto => {
            let mc = McwfConfig {
                n_traj: p.n_traj,
                seed: p.seed,
            };
            let out = mcwf_trajectories(h, &setup.jumps, &setup.initial, cfg, probes, mc)?;
            Outcome {
                fidelity: last(&out.series, "fidelity"),
                se: Some(last(&out.series, "fidelity_se")),
                series: out.series,
                diagnostics: out.diagnostics,
                state: FinalState::Ensemble,
            }
        }
    })
}

/// Assumptions recorded with every run.
pub fn assumptions(p: &ProtocolParams) -> Vec<String> {
    let mut a = vec![
        "frequencies in units of omega0, times in units of 1/omega0".to_string(),
        "kappa in units of omega0".to_string(),
        format!("time window [-{0}, {0}] centred on the midpoint of the pulse pair", p.t_final() / 2.0),
    ];
    if p.compensated && p.model != ModelChoice::Full {
        a.push("laser Stark shifts compensated".into());
    }
    if p.model == ModelChoice::Reduced {
        a.push("reduced model uses the level index m-1 in the coupling between zeta_{j,m+1} and zeta_{j+1,m}".into());
    }
    a
}

/// Runs the protocol with the standard probes. For the Schrödinger and
/// Lindblad solvers the run is repeated with half the step when
/// `convergence_tol` is set, and fails with `NotConverged` if the final
/// fidelity moves by more than the tolerance.
pub fn run_protocol(p: &ProtocolParams) -> Result<ProtocolRun> {
    let setup = ProtocolSetup::new(p)?;
    let probes = setup.standard_probes();
    let cfg = p.integrator();
    let solver = p.resolved_solver();
    let out = solve(&setup, p, &cfg, &probes)?;
    let convergence = match (p.convergence_tol, solver) {
        (Some(tol), SolverChoice::Schrodinger | SolverChoice::Lindblad) => {
            let fine = solve(&setup, p, &cfg.refined(), &probes[..1])?;
            let delta = (fine.fidelity - out.fidelity).abs();
            if !(delta <= tol) {
                return Err(Error::NotConverged { delta, tolerance: tol });
            }
            Some(delta)
        }
        _ => None,
    };
    let mut series = out.series;
    series.set_meta("params", serde_json::to_value(p).expect("params serialize"));
    series.set_meta("solver", json!(solver));
    series.set_meta("basis", setup.basis_note);
    series.set_meta("basis_dim", setup.dim());
    series.set_meta("seed", p.seed);
    series.set_meta("assumptions", Value::from(assumptions(p)));
    series.set_meta("diagnostics", serde_json::to_value(&out.diagnostics).expect("diagnostics serialize"));
    if let Some(c) = convergence {
        series.set_meta("convergence_delta", c);
    }
    Ok(ProtocolRun {
        params: p.clone(),
        solver,
        basis_dim: setup.dim(),
        series,
        final_fidelity: out.fidelity,
        fidelity_se: out.se,
        convergence,
        diagnostics: out.diagnostics,
        final_state: out.state,
    })
}
