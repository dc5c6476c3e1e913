//! Time-dependent Hamiltonians as sums `sum_p f_p(t) M_p` of constant
//! matrices with scalar time profiles.
//!
//! Builders produce a [`TermList`] of symbolic operators, each tagged with a
//! [`Profile`] and a conjugate-closure rule mirroring the `+ H.c.` of the
//! model. A term list is realized on a product catalog, or compressed onto a
//! [`Subspace`], giving a [`Hamiltonian`] whose matrices are grouped by
//! profile so that each profile is evaluated once per time point.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::params::{PulsePair, Pump};
use crate::error::{Error, Result};
use crate::linalg::{Csr, C64, ONE, ZERO};
use crate::qspace::{BasisCatalog, LevelScheme, Operator, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Full,
    EffectiveWithStark,
    EffectiveCompensated,
    ReducedSubspace,
}

/// Scalar time dependence of a group of terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Constant,
    /// `Omega_0k(t)`
    Pulse(Pump),
    /// `Omega_0k(t)^2`
    PulseSquared(Pump),
    /// `Omega_0k(t) exp(i w t)`
    PulsePhase(Pump, f64),
    /// `exp(i w t)`
    Phase(f64),
}

impl Profile {
    /// Canonical form: zero-frequency phases are real profiles.
    pub fn canonical(self) -> Self {
        match self {
            Profile::PulsePhase(p, w) if w == 0.0 => Profile::Pulse(p),
            Profile::Phase(w) if w == 0.0 => Profile::Constant,
            other => other,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Profile::Constant | Profile::Pulse(_) | Profile::PulseSquared(_))
    }

    /// Profile of the complex conjugate.
    pub fn conj(self) -> Self {
        match self {
            Profile::PulsePhase(p, w) => Profile::PulsePhase(p, -w),
            Profile::Phase(w) => Profile::Phase(-w),
            other => other,
        }
    }

    pub fn value(&self, pulses: &PulsePair, t: f64) -> C64 {
        match *self {
            Profile::Constant => ONE,
            Profile::Pulse(p) => C64::new(pulses.value(p, t), 0.0),
            Profile::PulseSquared(p) => {
                let v = pulses.value(p, t);
                C64::new(v * v, 0.0)
            }
            Profile::PulsePhase(p, w) => C64::from_polar(pulses.value(p, t), w * t),
            Profile::Phase(w) => C64::from_polar(1.0, w * t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    /// The operator is Hermitian and the profile real; added as is.
    SelfAdjoint,
    /// Adds `f(t)^* O^dagger` alongside `f(t) O`.
    AddConjugate,
}

/// `f(t) O` plus whatever the closure rule adds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub profile: Profile,
    pub op: Operator,
    pub closure: Closure,
}

/// Symbolic Hamiltonian on a tensor space.
#[derive(Clone, Debug)]
pub struct TermList {
    pub scheme: LevelScheme,
    pub pulses: PulsePair,
    pub kind: ModelKind,
    pub terms: Vec<Term>,
}

impl TermList {
    /// Terms merged by profile, with conjugate closures expanded. The result
    /// is closed under conjugation: the group of `p.conj()` holds the adjoint
    /// of the group of `p`.
    pub fn grouped(&self) -> Vec<(Profile, Operator)> {
        let mut groups: Vec<(Profile, Operator)> = Vec::new();
        let mut push = |profile: Profile, op: Operator| {
            let profile = profile.canonical();
            match groups.iter_mut().find(|(p, _)| *p == profile) {
                Some((_, acc)) => acc.terms.extend(op.terms),
                None => groups.push((profile, op)),
            }
        };
        for term in &self.terms {
            let profile = term.profile.canonical();
            match term.closure {
                Closure::SelfAdjoint => push(profile, term.op.clone()),
                Closure::AddConjugate if profile.is_real() => push(profile, term.op.clone().plus(&term.op.adjoint())),
                Closure::AddConjugate => {
                    push(profile, term.op.clone());
                    push(profile.conj(), term.op.adjoint());
                }
            }
        }
        groups
    }

    /// The time-independent operators whose span contains `H(t)` for every `t`.
    pub fn generators(&self) -> Vec<Operator> {
        self.grouped().into_iter().map(|(_, op)| op).collect()
    }

    /// Matrices on the full product catalog of the scheme.
    pub fn on_product_space(&self) -> Result<Hamiltonian> {
        let catalog = Arc::new(BasisCatalog::product(&self.scheme)?);
        self.realize(catalog)
    }

    /// Matrices on a product catalog (which must be closed under every term).
    pub fn realize(&self, catalog: Arc<BasisCatalog>) -> Result<Hamiltonian> {
        if catalog.scheme() != Some(&self.scheme) {
            return Err(Error::BasisMismatch("catalog scheme differs from the model's".into()));
        }
        let mut groups = Vec::new();
        for (profile, op) in self.grouped() {
            groups.push((profile, op.to_csr(&catalog)?));
        }
        Ok(Hamiltonian::from_groups(catalog, self.kind, self.pulses, groups, 0.0))
    }

    /// Compression onto a subspace. The reported leakage is the largest
    /// `||(1 - P) M_p v||` over groups and basis vectors.
    pub fn project(&self, subspace: &Subspace) -> Result<Hamiltonian> {
        if subspace.scheme() != &self.scheme {
            return Err(Error::BasisMismatch("subspace scheme differs from the model's".into()));
        }
        let mut groups = Vec::new();
        let mut leakage: f64 = 0.0;
        for (profile, op) in self.grouped() {
            let (mut m, leak) = op.project(subspace);
            leakage = leakage.max(leak);
            // Entries at roundoff level relative to the group are dropped.
            let floor = 1e-14 * m.iter().map(|v| v.norm()).fold(0.0, f64::max);
            m.iter_mut().filter(|v| v.norm() <= floor).for_each(|v| *v = ZERO);
            groups.push((profile, Csr::from_dense(&m)));
        }
        Ok(Hamiltonian::from_groups(
            subspace.catalog().clone(),
            self.kind,
            self.pulses,
            groups,
            leakage,
        ))
    }
}

/// Numerical `H(t) = sum_p f_p(t) M_p` over a basis catalog.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    basis: Arc<BasisCatalog>,
    kind: ModelKind,
    pulses: PulsePair,
    groups: Vec<(Profile, Csr)>,
    leakage: f64,
}

impl Hamiltonian {
    pub fn from_groups(
        basis: Arc<BasisCatalog>,
        kind: ModelKind,
        pulses: PulsePair,
        groups: Vec<(Profile, Csr)>,
        leakage: f64,
    ) -> Self {
        let groups = groups.into_iter().filter(|(_, m)| m.nnz() > 0).collect();
        Self {
            basis,
            kind,
            pulses,
            groups,
            leakage,
        }
    }

    /// The zero Hamiltonian on `basis`.
    pub fn zero(basis: Arc<BasisCatalog>, pulses: PulsePair) -> Self {
        Self::from_groups(basis, ModelKind::EffectiveCompensated, pulses, Vec::new(), 0.0)
    }

    pub fn basis(&self) -> &Arc<BasisCatalog> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn pulses(&self) -> &PulsePair {
        &self.pulses
    }

    pub fn groups(&self) -> &[(Profile, Csr)] {
        &self.groups
    }

    /// Largest norm of the part of `M_p v` outside the basis, for projected
    /// Hamiltonians; zero for product-space realizations.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// The same Hamiltonian without the groups rejected by `keep`.
    pub fn filtered<F: Fn(&Profile) -> bool>(&self, keep: F) -> Self {
        let groups = self.groups.iter().filter(|(p, _)| keep(p)).cloned().collect();
        Self {
            groups,
            ..self.clone()
        }
    }

    pub fn coefficients(&self, t: f64) -> Vec<C64> {
        self.groups.iter().map(|(p, _)| p.value(&self.pulses, t)).collect()
    }

    /// `y += alpha H x` with precomputed profile values.
    #[inline]
    pub fn apply_with(&self, coeffs: &[C64], alpha: C64, x: &[C64], y: &mut [C64]) {
        for ((_, m), c) in self.groups.iter().zip(coeffs) {
            if *c != ZERO {
                m.mul_vec_acc(alpha * c, x, y);
            }
        }
    }

    /// `y += alpha H(t) x`.
    pub fn apply_acc(&self, t: f64, alpha: C64, x: &[C64], y: &mut [C64]) {
        let coeffs = self.coefficients(t);
        self.apply_with(&coeffs, alpha, x, y);
    }

    /// `Y += alpha H(t) X` for dense `X`.
    pub fn apply_dense_acc(&self, t: f64, alpha: C64, x: &DMatrix<C64>, y: &mut DMatrix<C64>) {
        for ((_, m), c) in self.groups.iter().zip(self.coefficients(t)) {
            if c != ZERO {
                m.mul_dense_acc(alpha * c, x, y);
            }
        }
    }

    pub fn matrix_at(&self, t: f64) -> Csr {
        let n = self.dim();
        let mut trip = Vec::new();
        for ((_, m), c) in self.groups.iter().zip(self.coefficients(t)) {
            trip.extend(m.iter().map(|(r, cc, v)| (r, cc, c * v)));
        }
        Csr::from_triplets(n, n, trip)
    }

    pub fn dense_at(&self, t: f64) -> DMatrix<C64> {
        self.matrix_at(t).to_dense()
    }
}
