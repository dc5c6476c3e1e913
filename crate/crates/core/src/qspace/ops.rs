//! Symbolic operators on the atoms-plus-cavity tensor space.
//!
//! An [`Operator`] is a sum of [`ProductOp`]s, each a product of single-atom
//! transitions `|to><from|_k` and one bosonic factor. Operators act directly on
//! product labels, so they can be applied to sparse [`Ket`]s of any size or
//! realized as matrices on an explicit catalog.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::{BasisCatalog, BasisLabel, LevelScheme, StateLabel};
use super::ket::Ket;
use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{Csr, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhotonOp {
    Identity,
    /// `a^dagger`; acting on `|cutoff>` gives zero (truncation).
    Create,
    /// `a`; acting on the vacuum gives zero.
    Annihilate,
    /// `a^dagger a`.
    Number,
}

impl PhotonOp {
    /// New photon number and matrix element, or `None` if the action vanishes.
    pub fn act(self, n: u32, cutoff: usize) -> Option<(u32, f64)> {
        match self {
            PhotonOp::Identity => Some((n, 1.0)),
            PhotonOp::Create => ((n as usize) < cutoff).then(|| (n + 1, ((n + 1) as f64).sqrt())),
            PhotonOp::Annihilate => (n > 0).then(|| (n - 1, (n as f64).sqrt())),
            PhotonOp::Number => (n > 0).then_some((n, n as f64)),
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            PhotonOp::Create => PhotonOp::Annihilate,
            PhotonOp::Annihilate => PhotonOp::Create,
            other => other,
        }
    }
}

/// Single-atom transition `|to><from|` on atom `atom` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub atom: usize,
    pub to: u8,
    pub from: u8,
}

/// `coefficient * T_1 T_2 ... T_r * photon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductOp {
    pub coefficient: C64,
    pub transitions: Vec<Transition>,
    pub photon: PhotonOp,
}

impl ProductOp {
    pub fn new(coefficient: C64, transitions: Vec<Transition>, photon: PhotonOp) -> Self {
        Self {
            coefficient,
            transitions,
            photon,
        }
    }

    /// `|to><from|_atom`, optionally dressed with a photon factor.
    pub fn local(atom: usize, to: u8, from: u8, photon: PhotonOp) -> Self {
        Self::new(ONE, vec![Transition { atom, to, from }], photon)
    }

    pub fn photon_only(photon: PhotonOp) -> Self {
        Self::new(ONE, Vec::new(), photon)
    }

    pub fn scaled(mut self, s: C64) -> Self {
        self.coefficient *= s;
        self
    }

    pub fn apply_label(&self, label: &BasisLabel, cutoff: usize) -> Option<(BasisLabel, C64)> {
        let (photons, factor) = self.photon.act(label.photon_number, cutoff)?;
        let mut levels = label.atom_levels.clone();
        // Rightmost factor acts first.
        for t in self.transitions.iter().rev() {
            let slot = levels.get_mut(t.atom)?;
            if *slot != t.from {
                return None;
            }
            *slot = t.to;
        }
        Some((BasisLabel::new(levels, photons), self.coefficient * factor))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            transitions: self
                .transitions
                .iter()
                .rev()
                .map(|t| Transition {
                    atom: t.atom,
                    to: t.from,
                    from: t.to,
                })
                .collect(),
            photon: self.photon.adjoint(),
        }
    }
}

/// A sum of product operators.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    pub terms: Vec<ProductOp>,
}

impl Operator {
    pub fn new(terms: Vec<ProductOp>) -> Self {
        Self { terms }
    }

    pub fn single(term: ProductOp) -> Self {
        Self { terms: vec![term] }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.terms.iter().map(ProductOp::adjoint).collect())
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(self.terms.iter().cloned().map(|t| t.scaled(s)).collect())
    }

    pub fn plus(mut self, other: &Operator) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn apply(&self, ket: &Ket, cutoff: usize) -> Ket {
        let mut out = Ket::new();
        for (label, amp) in ket.iter() {
            for term in &self.terms {
                if let Some((l, f)) = term.apply_label(label, cutoff) {
                    out.add(l, f * amp);
                }
            }
        }
        out.prune(0.0);
        out
    }

    /// Matrix of the operator on a product catalog. Components that leave the
    /// catalog are an error.
    pub fn to_csr(&self, catalog: &BasisCatalog) -> Result<Csr> {
        let scheme = catalog
            .scheme()
            .ok_or_else(|| Error::BasisMismatch("operator realization needs a product catalog".into()))?;
        let cutoff = scheme.photon_cutoff;
        let mut triplets = Vec::new();
        for (col, label) in catalog.labels().iter().enumerate() {
            let StateLabel::Product(b) = label else {
                return Err(Error::BasisMismatch(format!("label {label} is not a product label")));
            };
            for term in &self.terms {
                if let Some((l, f)) = term.apply_label(b, cutoff) {
                    let row = catalog
                        .index_of_product(&l)
                        .ok_or_else(|| Error::BasisMismatch(format!("operator maps {b} to {l}, outside the catalog")))?;
                    triplets.push((row, col, f));
                }
            }
        }
        Ok(Csr::from_triplets(catalog.len(), catalog.len(), triplets))
    }

    /// Compression `V^dagger O V` onto an orthonormal subspace, and the leakage
    /// `max_b ||(1 - P) O v_b||`.
    pub fn project(&self, subspace: &Subspace) -> (DMatrix<C64>, f64) {
        let cutoff = subspace.scheme().photon_cutoff;
        let vectors = subspace.vectors();
        let d = vectors.len();
        let mut m = DMatrix::from_element(d, d, ZERO);
        let mut leakage: f64 = 0.0;
        for (b, vb) in vectors.iter().enumerate() {
            let image = self.apply(vb, cutoff);
            let mut residual = image.clone();
            for (a, va) in vectors.iter().enumerate() {
                let e = va.inner(&image);
                m[(a, b)] = e;
                if e != ZERO {
                    residual.axpy(-e, va);
                }
            }
            leakage = leakage.max(residual.norm());
        }
        (m, leakage)
    }
}

/// Embeds a single-atom state as a new atom at position `atom_index` of every
/// component of `rest`.
pub fn tensor_insert(local: &[C64], atom_index: usize, rest: &Ket) -> Result<Ket> {
    let mut out = Ket::new();
    for (label, amp) in rest.iter() {
        if atom_index > label.atom_levels.len() {
            return Err(Error::InvalidArgument(format!(
                "atom index {atom_index} beyond {} atoms",
                label.atom_levels.len()
            )));
        }
        for (level, c) in local.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let mut levels = label.atom_levels.clone();
            levels.insert(atom_index, level as u8);
            out.add(BasisLabel::new(levels, label.photon_number), c * amp);
        }
    }
    Ok(out)
}

/// `a^dagger` on every component; components at the cutoff are dropped.
pub fn fock_raise(ket: &Ket, scheme: &LevelScheme) -> Ket {
    Operator::single(ProductOp::photon_only(PhotonOp::Create)).apply(ket, scheme.photon_cutoff)
}

/// `a` on every component; vacuum components are dropped.
pub fn fock_lower(ket: &Ket, scheme: &LevelScheme) -> Ket {
    Operator::single(ProductOp::photon_only(PhotonOp::Annihilate)).apply(ket, scheme.photon_cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_atom(level: u8, n: u32) -> Ket {
        Ket::basis(BasisLabel::new(vec![level], n))
    }

    #[test]
    fn lowering_vacuum_is_zero() {
        let s = LevelScheme::effective(1, 3);
        assert!(fock_lower(&one_atom(0, 0), &s).is_empty());
    }

    #[test]
    fn raising_scales_by_sqrt_n_plus_one() {
        let s = LevelScheme::effective(1, 3);
        for n in 0..3u32 {
            let k = fock_raise(&one_atom(0, n), &s);
            let amp = k.get(&BasisLabel::new(vec![0], n + 1));
            assert!((amp.re - ((n + 1) as f64).sqrt()).abs() < 1e-15);
        }
        assert!(fock_raise(&one_atom(0, 3), &s).is_empty());
    }

    #[test]
    fn raise_then_lower() {
        let s = LevelScheme::effective(1, 4);
        for n in 0..4u32 {
            let k = fock_lower(&fock_raise(&one_atom(0, n), &s), &s);
            assert!((k.get(&BasisLabel::new(vec![0], n)).re - (n + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn adjoint_matches_matrix_adjoint() {
        let s = LevelScheme::effective(2, 2);
        let cat = BasisCatalog::product(&s).unwrap();
        let op = Operator::new(vec![
            ProductOp::local(1, 1, 0, PhotonOp::Create).scaled(C64::new(0.3, -0.2)),
            ProductOp::local(0, 0, 1, PhotonOp::Number),
        ]);
        let m = op.to_csr(&cat).unwrap();
        let madj = op.adjoint().to_csr(&cat).unwrap();
        assert_eq!(m.adjoint(), madj);
    }

    #[test]
    fn transitions_require_matching_level() {
        let t = ProductOp::local(0, 2, 1, PhotonOp::Identity);
        assert!(t.apply_label(&BasisLabel::new(vec![0], 0), 0).is_none());
        let (l, _) = t.apply_label(&BasisLabel::new(vec![1], 0), 0).unwrap();
        assert_eq!(l.atom_levels, vec![2]);
    }

    #[test]
    fn tensor_insert_places_atom() {
        let rest = Ket::basis(BasisLabel::new(vec![1, 2], 0));
        let k = tensor_insert(&[ONE, C64::new(2.0, 0.0)], 0, &rest).unwrap();
        assert_eq!(k.get(&BasisLabel::new(vec![1, 1, 2], 0)), C64::new(2.0, 0.0));
        assert_eq!(k.get(&BasisLabel::new(vec![0, 1, 2], 0)), ONE);
        assert!(tensor_insert(&[ONE], 3, &rest).is_err());
    }
}
