use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;

use super::basis::{BasisCatalog, BasisLabel, StateLabel};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// Sparse state over product labels of a tensor space.
///
/// Used to build and embed states (singlets, `zeta` states, closure spans)
/// without materializing the full tensor-product dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ket {
    amps: BTreeMap<BasisLabel, C64>,
}

impl Ket {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(label: BasisLabel) -> Self {
        let mut k = Self::new();
        k.add(label, ONE);
        k
    }

    pub fn add(&mut self, label: BasisLabel, amp: C64) {
        *self.amps.entry(label).or_insert(ZERO) += amp;
    }

    pub fn get(&self, label: &BasisLabel) -> C64 {
        self.amps.get(label).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &C64)> {
        self.amps.iter()
    }

    /// Number of stored components, including any exact cancellations not yet pruned.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = ZERO;
        for (l, a) in &small.amps {
            if let Some(b) = large.amps.get(l) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    pub fn scale(&mut self, s: C64) {
        for a in self.amps.values_mut() {
            *a *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C64, other: &Ket) {
        for (l, a) in &other.amps {
            self.add(l.clone(), s * a);
        }
    }

    /// Drops components with modulus at or below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.amps.retain(|_, a| a.norm() > tol);
    }

    /// Unit vector along `self`, together with the original norm.
    pub fn normalized(&self) -> Result<(Ket, f64)> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector("cannot normalize a zero ket".into()));
        }
        let mut k = self.clone();
        k.scale(C64::new(1.0 / n, 0.0));
        Ok((k, n))
    }

    pub fn map_labels<F: Fn(&BasisLabel) -> BasisLabel>(&self, f: F) -> Ket {
        let mut out = Ket::new();
        for (l, a) in &self.amps {
            out.add(f(l), *a);
        }
        out
    }
}

/// Dense amplitudes over a basis catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: Arc<BasisCatalog>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(basis: Arc<BasisCatalog>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn zeros(basis: Arc<BasisCatalog>) -> Self {
        let n = basis.len();
        Self {
            basis,
            amplitudes: DVector::zeros(n),
        }
    }

    pub fn basis_state(basis: Arc<BasisCatalog>, index: usize) -> Result<Self> {
        if index >= basis.len() {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut s = Self::zeros(basis);
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    pub fn from_label(basis: Arc<BasisCatalog>, label: &StateLabel) -> Result<Self> {
        let idx = basis
            .index_of(label)
            .ok_or_else(|| Error::BasisMismatch(format!("label {label} not in basis")))?;
        Self::basis_state(basis, idx)
    }

    /// Expands a sparse product ket on a product catalog. Every nonzero
    /// component must be representable.
    pub fn from_ket(ket: &Ket, basis: Arc<BasisCatalog>) -> Result<Self> {
        let mut s = Self::zeros(basis);
        for (l, a) in ket.iter() {
            if *a == ZERO {
                continue;
            }
            let i = s
                .basis
                .index_of_product(l)
                .ok_or_else(|| Error::BasisMismatch(format!("ket component {l} not in basis")))?;
            s.amplitudes[i] += a;
        }
        Ok(s)
    }

    pub fn to_ket(&self) -> Result<Ket> {
        let mut k = Ket::new();
        for (l, a) in self.basis.labels().iter().zip(self.amplitudes.iter()) {
            match l {
                StateLabel::Product(b) => {
                    if *a != ZERO {
                        k.add(b.clone(), *a)
                    }
                }
                other => {
                    return Err(Error::BasisMismatch(format!("label {other} is not a product label")))
                }
            }
        }
        Ok(k)
    }

    pub fn basis(&self) -> &Arc<BasisCatalog> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, label: &StateLabel) -> Option<C64> {
        self.basis.index_of(label).map(|i| self.amplitudes[i])
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector("cannot normalize a zero state".into()));
        }
        self.amplitudes /= C64::new(n, 0.0);
        Ok(n)
    }

    pub fn same_basis(&self, other: &StateVector) -> bool {
        same_catalog(&self.basis, &other.basis)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch("inner product across different bases".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

pub fn same_catalog(a: &Arc<BasisCatalog>, b: &Arc<BasisCatalog>) -> bool {
    Arc::ptr_eq(a, b) || a.labels() == b.labels()
}
