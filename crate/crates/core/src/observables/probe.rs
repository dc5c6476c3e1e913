use std::sync::Arc;

use super::measures::{dark_overlap, fidelity, photon_mean, populations, DarkEmbedding, StateRef};
use crate::error::Result;
use crate::model::ModelParams;
use crate::qspace::StateVector;

/// A named scalar sampled along a trajectory.
#[derive(Clone, Debug)]
pub enum Probe {
    Fidelity { name: String, target: StateVector },
    /// `NaN` where the dark state is undefined (both couplings off).
    DarkOverlap {
        params: Box<ModelParams>,
        embedding: Arc<DarkEmbedding>,
    },
    Trace,
    PhotonMean,
    Population { name: String, index: usize },
    /// Total population of a set of basis states.
    PopulationSum { name: String, indices: Arc<Vec<usize>> },
}

impl Probe {
    pub fn fidelity(target: StateVector) -> Self {
        Probe::Fidelity {
            name: "fidelity".into(),
            target,
        }
    }

    pub fn dark_overlap(params: &ModelParams, embedding: Arc<DarkEmbedding>) -> Self {
        Probe::DarkOverlap {
            params: Box::new(params.clone()),
            embedding,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Probe::Fidelity { name, .. } | Probe::Population { name, .. } | Probe::PopulationSum { name, .. } => name,
            Probe::DarkOverlap { .. } => "dark_overlap",
            Probe::Trace => "trace",
            Probe::PhotonMean => "photon_mean",
        }
    }

    pub fn measure(&self, t: f64, state: StateRef<'_>) -> Result<f64> {
        match self {
            Probe::Fidelity { target, .. } => fidelity(state, target),
            Probe::DarkOverlap { params, embedding } => match dark_overlap(state, embedding, params, t) {
                Err(crate::Error::ZeroVector(_)) => Ok(f64::NAN),
                other => other,
            },
            Probe::Trace => Ok(state.trace()),
            Probe::PhotonMean => Ok(photon_mean(state)),
            Probe::Population { index, .. } => Ok(populations(state)[*index]),
            Probe::PopulationSum { indices, .. } => {
                let p = populations(state);
                Ok(indices.iter().map(|&i| p[i]).sum())
            }
        }
    }
}

/// Values of every probe at one sample.
pub fn measure_all(probes: &[Probe], t: f64, state: StateRef<'_>) -> Result<Vec<f64>> {
    probes.iter().map(|p| p.measure(t, state)).collect()
}
