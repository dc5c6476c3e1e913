use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::basis::{BasisCatalog, LevelScheme, StateLabel};
use super::ket::{Ket, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// An orthonormal set of kets embedded in a tensor space, with a catalog
/// naming each vector. Both the `zeta` basis and closure spans are subspaces.
#[derive(Clone, Debug)]
pub struct Subspace {
    scheme: LevelScheme,
    catalog: Arc<BasisCatalog>,
    vectors: Vec<Ket>,
}

impl Subspace {
    pub fn new(scheme: LevelScheme, labels: Vec<StateLabel>, vectors: Vec<Ket>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if let Some(bad) = vectors
            .iter()
            .flat_map(|v| v.iter().map(|(l, _)| l))
            .find(|l| !scheme.label_is_valid(l))
        {
            return Err(Error::InvalidArgument(format!("component {bad} invalid for {scheme:?}")));
        }
        let catalog = Arc::new(BasisCatalog::from_labels(labels, Some(scheme))?);
        Ok(Self {
            scheme,
            catalog,
            vectors,
        })
    }

    pub fn scheme(&self) -> &LevelScheme {
        &self.scheme
    }

    pub fn catalog(&self) -> &Arc<BasisCatalog> {
        &self.catalog
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn vector(&self, label: &StateLabel) -> Option<&Ket> {
        self.catalog.index_of(label).map(|i| &self.vectors[i])
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn gram(&self) -> DMatrix<C64> {
        let d = self.len();
        DMatrix::from_fn(d, d, |a, b| self.vectors[a].inner(&self.vectors[b]))
    }

    /// Largest entry of `|G - 1|` for the Gram matrix `G`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let d = self.len();
        (g - DMatrix::<C64>::identity(d, d)).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Coordinates of `ket` in this basis and the norm of the part outside it.
    pub fn coordinates(&self, ket: &Ket) -> (DVector<C64>, f64) {
        let coords = DVector::from_iterator(self.len(), self.vectors.iter().map(|v| v.inner(ket)));
        let mut residual = ket.clone();
        for (v, c) in self.vectors.iter().zip(coords.iter()) {
            if *c != ZERO {
                residual.axpy(-*c, v);
            }
        }
        (coords, residual.norm())
    }

    /// State vector over this subspace's catalog for an embedded ket.
    pub fn restrict(&self, ket: &Ket) -> StateVector {
        let (coords, _) = self.coordinates(ket);
        StateVector::new(self.catalog.clone(), coords).expect("coordinate length matches catalog")
    }

    /// Embedded ket for coordinates over this subspace.
    pub fn embed(&self, coords: &DVector<C64>) -> Ket {
        let mut out = Ket::new();
        for (v, c) in self.vectors.iter().zip(coords.iter()) {
            if *c != ZERO {
                out.axpy(*c, v);
            }
        }
        out
    }

    /// Isometry from `other` into `self`: `M[a, b] = <self_a | other_b>`.
    pub fn overlap_matrix(&self, other: &Subspace) -> DMatrix<C64> {
        DMatrix::from_fn(self.len(), other.len(), |a, b| self.vectors[a].inner(&other.vectors[b]))
    }
}
