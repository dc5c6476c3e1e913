use std::sync::Arc;

use nalgebra::DVector;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{dark_weights, ModelParams};
use crate::qspace::{same_catalog, zeta_ket, BasisCatalog, StateLabel, StateVector, Subspace};

/// A pure or mixed state.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn basis(&self) -> &Arc<BasisCatalog> {
        match self {
            StateRef::Pure(s) => s.basis(),
            StateRef::Mixed(r) => r.basis(),
        }
    }

    /// `<v|state|v>` for an amplitude vector `v` over the same basis.
    fn expectation_of_projector(&self, v: &DVector<C64>) -> C64 {
        match self {
            StateRef::Pure(s) => {
                let a = v.dotc(s.amplitudes());
                C64::new(a.norm_sqr(), 0.0)
            }
            StateRef::Mixed(r) => v.dotc(&(r.elements() * v)),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            StateRef::Pure(s) => s.amplitudes().norm_squared(),
            StateRef::Mixed(r) => r.trace(),
        }
    }
}

fn check_basis(a: &Arc<BasisCatalog>, b: &Arc<BasisCatalog>) -> Result<()> {
    if same_catalog(a, b) {
        Ok(())
    } else {
        Err(Error::BasisMismatch("state and target live on different bases".into()))
    }
}

/// `|<target|psi>|^2` for pure states and `|<target|rho|target>|` for
/// mixed ones, clamped to `[0, 1]`.
pub fn fidelity<'a>(state: impl Into<StateRef<'a>>, target: &StateVector) -> Result<f64> {
    let state = state.into();
    check_basis(state.basis(), target.basis())?;
    let f = state.expectation_of_projector(target.amplitudes()).norm();
    Ok(f.clamp(0.0, 1.0))
}

/// Diagonal of the state in its basis.
pub fn populations<'a>(state: impl Into<StateRef<'a>>) -> Vec<f64> {
    match state.into() {
        StateRef::Pure(s) => s.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
        StateRef::Mixed(r) => r.elements().diagonal().iter().map(|a| a.re).collect(),
    }
}

/// `<a^dagger a>`, from the photon number carried by each basis label.
pub fn photon_mean<'a>(state: impl Into<StateRef<'a>>) -> f64 {
    let state = state.into();
    let ns = state.basis().photon_numbers();
    populations(state).iter().zip(ns).map(|(p, n)| p * n).sum()
}

/// The states `|zeta_{0,p+1}>`, `p = 0..N-1`, as vectors over some basis, so the
/// analytic dark state can be formed there.
#[derive(Clone, Debug)]
pub struct DarkEmbedding {
    n: usize,
    basis: Arc<BasisCatalog>,
    components: Vec<DVector<C64>>,
}

impl DarkEmbedding {
    /// On a `zeta` catalog, where each component is a basis vector.
    pub fn on_zeta(n: usize, catalog: &Arc<BasisCatalog>) -> Result<Self> {
        let components = (0..n)
            .map(|p| StateVector::from_label(catalog.clone(), &StateLabel::Zeta { j: 0, m: p + 1 }))
            .map(|s| s.map(StateVector::into_amplitudes))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            basis: catalog.clone(),
            components,
        })
    }

    /// On a product catalog of the effective model.
    pub fn on_product(n: usize, catalog: &Arc<BasisCatalog>) -> Result<Self> {
        let components = (0..n)
            .map(|p| zeta_ket(n, 0, p + 1).and_then(|k| StateVector::from_ket(&k, catalog.clone())))
            .map(|s| s.map(StateVector::into_amplitudes))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            basis: catalog.clone(),
            components,
        })
    }

    /// On a subspace containing the `zeta` span.
    pub fn on_subspace(n: usize, subspace: &Subspace) -> Result<Self> {
        let mut components = Vec::with_capacity(n);
        for p in 0..n {
            let (coords, outside) = subspace.coordinates(&zeta_ket(n, 0, p + 1)?);
            if outside > 1e-10 {
                return Err(Error::BasisMismatch(format!(
                    "zeta(0,{}) lies outside the subspace by {outside:e}",
                    p + 1
                )));
            }
            components.push(coords);
        }
        Ok(Self {
            n,
            basis: subspace.catalog().clone(),
            components,
        })
    }

    pub fn basis(&self) -> &Arc<BasisCatalog> {
        &self.basis
    }

    /// Normalized `|D(t)>` over this basis.
    pub fn dark_vector(&self, params: &ModelParams, t: f64) -> Result<StateVector> {
        if params.n != self.n {
            return Err(Error::InvalidArgument(format!(
                "embedding for N = {} used with N = {}",
                self.n, params.n
            )));
        }
        let w = dark_weights(params, t);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector(format!("dark state undefined at t = {t}: both couplings vanish")));
        }
        let mut v = DVector::zeros(self.basis.len());
        for (c, wp) in self.components.iter().zip(&w) {
            v.axpy(C64::new(wp / norm, 0.0), c, C64::new(1.0, 0.0));
        }
        StateVector::new(self.basis.clone(), v)
    }
}

/// Fidelity with the instantaneous dark state.
pub fn dark_overlap<'a>(
    state: impl Into<StateRef<'a>>,
    embedding: &DarkEmbedding,
    params: &ModelParams,
    t: f64,
) -> Result<f64> {
    let d = embedding.dark_vector(params, t)?;
    fidelity(state, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PulsePair;
    use crate::qspace::{singlet_ket, zeta_basis};

    fn defaults(n: usize) -> ModelParams {
        ModelParams::uniform(n, PulsePair::new(1.0, 800.0, 400.0).unwrap(), 1.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn self_fidelity_and_orthogonality() {
        let z = zeta_basis(3).unwrap();
        let s = z.restrict(&singlet_ket(3).unwrap());
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        let rho = DensityMatrix::from_pure(&s);
        assert!((fidelity(&rho, &s).unwrap() - 1.0).abs() < 1e-12);
        // zeta_{1,1} carries a photon, so it is orthogonal to the singlet.
        let other = StateVector::from_label(z.catalog().clone(), &StateLabel::Zeta { j: 1, m: 1 }).unwrap();
        assert_eq!(fidelity(&other, &s).unwrap(), 0.0);
        assert_eq!(fidelity(&DensityMatrix::from_pure(&other), &s).unwrap(), 0.0);
    }

    #[test]
    fn initial_state_observables() {
        let z = zeta_basis(4).unwrap();
        let psi = StateVector::from_label(z.catalog().clone(), &StateLabel::Zeta { j: 0, m: 4 }).unwrap();
        let pops = populations(&psi);
        assert_eq!(pops[z.catalog().index_of(&StateLabel::Zeta { j: 0, m: 4 }).unwrap()], 1.0);
        assert_eq!(photon_mean(&psi), 0.0);
        let s = z.restrict(&singlet_ket(4).unwrap());
        assert!(photon_mean(&s).abs() < 1e-15);
        assert!((populations(&s).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dark_overlap_of_dark_state_is_one() {
        let p = defaults(3);
        let z = zeta_basis(3).unwrap();
        let e = DarkEmbedding::on_zeta(3, z.catalog()).unwrap();
        let d = e.dark_vector(&p, 100.0).unwrap();
        assert!((dark_overlap(&d, &e, &p, 100.0).unwrap() - 1.0).abs() < 1e-12);
        let direct = crate::model::dark_state(&p, 100.0, z.catalog()).unwrap();
        assert!((d.amplitudes() - direct.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn product_embedding_matches_zeta_embedding() {
        let p = defaults(3);
        let z = zeta_basis(3).unwrap();
        let prod = Arc::new(BasisCatalog::product(z.scheme()).unwrap());
        let e = DarkEmbedding::on_product(3, &prod).unwrap();
        let d = e.dark_vector(&p, -300.0).unwrap();
        let zd = DarkEmbedding::on_zeta(3, z.catalog()).unwrap().dark_vector(&p, -300.0).unwrap();
        let back = z.restrict(&d.to_ket().unwrap());
        assert!((back.amplitudes() - zd.amplitudes()).norm() < 1e-12);
    }
}
