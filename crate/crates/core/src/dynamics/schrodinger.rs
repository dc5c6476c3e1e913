use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, IntegratorConfig, Method, Rhs, StepStats};
use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::model::{Hamiltonian, ModelKind, Profile};
use crate::observables::{measure_all, Probe, StateRef, TimeSeries};
use crate::qspace::{same_catalog, StateVector};

/// Largest step for the full model as a fraction of the fastest period `1/Delta`.
pub const FULL_MODEL_STEP: f64 = 0.02;

/// Run diagnostics attached to every evolution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: StepStats,
    /// `max | ||psi||^2 - 1 |` (pure) or `max |tr rho - 1|` (mixed) over samples.
    pub norm_drift: f64,
    /// Largest correction made by Hermitian symmetrization.
    pub symmetrization: f64,
    pub min_eigenvalue: Option<f64>,
    pub leakage: f64,
    pub mean_jumps: Option<f64>,
}

/// Sampled observables, the final state and diagnostics.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub series: TimeSeries,
    pub final_state: S,
    pub diagnostics: Diagnostics,
}

/// Rejects fixed steps too coarse for the detuning phases of the full model.
pub(crate) fn check_resolution(h: &Hamiltonian, cfg: &IntegratorConfig) -> Result<()> {
    if h.kind() != ModelKind::Full || cfg.method != Method::Rk4 {
        return Ok(());
    }
    let w = h
        .groups()
        .iter()
        .map(|(p, _)| match p {
            Profile::Phase(w) | Profile::PulsePhase(_, w) => w.abs(),
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    if w > 0.0 && cfg.step_size() > FULL_MODEL_STEP / w * (1.0 + 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "step {} does not resolve detuning {w}: need dt <= {}",
            cfg.step_size(),
            FULL_MODEL_STEP / w
        )));
    }
    Ok(())
}

pub(crate) fn series_for(probes: &[Probe]) -> TimeSeries {
    TimeSeries::over_time(probes.iter().map(|p| p.name().to_string()))
}

struct SchrodingerRhs<'a> {
    h: &'a Hamiltonian,
}

impl Rhs for SchrodingerRhs<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        dy.fill(C64::new(0.0, 0.0));
        self.h.apply_acc(t, -I, y, dy);
    }
}

/// Integrates `i dpsi/dt = H(t) psi`. The norm is not renormalized; its drift
/// is reported in the diagnostics.
pub fn propagate_schrodinger(
    h: &Hamiltonian,
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    probes: &[Probe],
) -> Result<Evolution<StateVector>> {
    if !same_catalog(h.basis(), psi0.basis()) {
        return Err(Error::BasisMismatch("initial state and Hamiltonian use different bases".into()));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("initial state has norm {}", psi0.norm())));
    }
    check_resolution(h, cfg)?;
    let mut series = series_for(probes);
    let mut drift: f64 = 0.0;
    let mut y: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    let basis = h.basis().clone();
    let steps = integrate(&mut SchrodingerRhs { h }, &mut y, cfg, |t, y| {
        let psi = StateVector::new(basis.clone(), DVector::from_column_slice(y))?;
        drift = drift.max((psi.amplitudes().norm_squared() - 1.0).abs());
        series.push(t, &measure_all(probes, t, StateRef::Pure(&psi))?)
    })?;
    Ok(Evolution {
        series,
        final_state: StateVector::new(basis, DVector::from_vec(y))?,
        diagnostics: Diagnostics {
            steps,
            norm_drift: drift,
            leakage: h.leakage(),
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Csr;
    use crate::model::PulsePair;
    use crate::qspace::{BasisCatalog, BasisLabel, StateLabel};
    use std::sync::Arc;

    fn two_level() -> Arc<BasisCatalog> {
        let labels = (0..2u8).map(|k| StateLabel::Product(BasisLabel::new(vec![k], 0))).collect();
        Arc::new(BasisCatalog::from_labels(labels, None).unwrap())
    }

    fn pulses() -> PulsePair {
        PulsePair::new(1.0, 1.0, 0.0).unwrap()
    }

    fn population(index: usize) -> Probe {
        Probe::Population {
            name: format!("p{index}"),
            index,
        }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let b = two_level();
        let h = Hamiltonian::zero(b.clone(), pulses());
        let psi0 = StateVector::from_label(b.clone(), b.label(1)).unwrap();
        let ev = propagate_schrodinger(&h, &psi0, &IntegratorConfig::rk4(0.0, 10.0, 0.1), &[]).unwrap();
        assert_eq!(ev.final_state, psi0);
    }

    #[test]
    fn rabi_oscillation() {
        let b = two_level();
        let omega = 0.7;
        let sx = Csr::from_triplets(2, 2, vec![(0, 1, C64::new(omega, 0.0)), (1, 0, C64::new(omega, 0.0))]);
        let h = Hamiltonian::from_groups(b.clone(), ModelKind::EffectiveCompensated, pulses(), vec![(Profile::Constant, sx)], 0.0);
        let psi0 = StateVector::from_label(b.clone(), b.label(0)).unwrap();
        let t_end = std::f64::consts::FRAC_PI_4 / omega;
        let cfg = IntegratorConfig::rk4(0.0, t_end, 1e-3);
        let ev = propagate_schrodinger(&h, &psi0, &cfg, &[population(1)]).unwrap();
        let p1 = ev.series.last("p1").unwrap();
        assert!((p1 - (omega * t_end).sin().powi(2)).abs() < 1e-8);
        assert!(ev.diagnostics.norm_drift < 1e-12);
    }

    #[test]
    fn basis_mismatch_rejected() {
        let b = two_level();
        let other = Arc::new(BasisCatalog::from_labels(vec![StateLabel::Zeta { j: 0, m: 1 }], None).unwrap());
        let h = Hamiltonian::zero(b, pulses());
        let psi0 = StateVector::basis_state(other, 0).unwrap();
        assert!(matches!(
            propagate_schrodinger(&h, &psi0, &IntegratorConfig::rk4(0.0, 1.0, 0.1), &[]),
            Err(Error::BasisMismatch(_))
        ));
    }
}
