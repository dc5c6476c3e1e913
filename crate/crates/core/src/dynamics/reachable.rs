use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::qspace::{Ket, LevelScheme, Operator, PhotonOp, StateLabel, Subspace};

/// A candidate is new if its component orthogonal to the span keeps this
/// fraction of its norm.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

fn photon_shift(p: PhotonOp) -> i8 {
    match p {
        PhotonOp::Create => 1,
        PhotonOp::Annihilate => -1,
        PhotonOp::Identity | PhotonOp::Number => 0,
    }
}

/// Splits each generator into parts of definite photon-number change, so
/// that images of photon-number eigenstates stay eigenstates.
fn split_by_shift(generators: &[Operator]) -> Vec<Operator> {
    let mut out = Vec::new();
    for g in generators {
        let mut parts: BTreeMap<i8, Operator> = BTreeMap::new();
        for t in &g.terms {
            parts.entry(photon_shift(t.photon)).or_default().terms.push(t.clone());
        }
        out.extend(parts.into_values());
    }
    out
}

fn split_by_photons(ket: &Ket) -> BTreeMap<u32, Ket> {
    let mut out: BTreeMap<u32, Ket> = BTreeMap::new();
    for (l, a) in ket.iter() {
        out.entry(l.photon_number).or_default().add(l.clone(), *a);
    }
    out
}

/// Orthonormal bases of the photon-number sectors found so far.
#[derive(Default)]
struct Sectors {
    by_photons: BTreeMap<u32, Vec<Ket>>,
    len: usize,
}

impl Sectors {
    /// Adds the normalized new direction of `w` (a photon-number eigenstate),
    /// if any, and returns it.
    fn try_add(&mut self, w: &Ket, photons: u32) -> Option<Ket> {
        let scale = w.norm();
        if scale == 0.0 {
            return None;
        }
        let basis = self.by_photons.entry(photons).or_default();
        let mut r = w.clone();
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.inner(&r);
                if c != C64::new(0.0, 0.0) {
                    r.axpy(-c, b);
                }
            }
        }
        r.prune(1e-14 * scale);
        if r.norm() <= INDEPENDENCE_TOL * scale {
            return None;
        }
        let (v, _) = r.normalized().ok()?;
        basis.push(v.clone());
        self.len += 1;
        Some(v)
    }
}

/// Smallest span containing `seeds` and closed under every generator,
/// built by repeated application and Gram–Schmidt within photon-number
/// sectors. The result is ordered by photon number, then by discovery, with
/// labels `Span { index, photon_number }`.
///
/// Errors with the size after each round if the span is still growing after
/// `max_iterations` rounds.
pub fn reachable_basis(
    scheme: &LevelScheme,
    seeds: &[Ket],
    generators: &[Operator],
    max_iterations: usize,
) -> Result<Subspace> {
    scheme.validate()?;
    let parts = split_by_shift(generators);
    let mut sectors = Sectors::default();
    let mut frontier = Vec::new();
    for s in seeds {
        for (n, k) in split_by_photons(s) {
            if let Some(v) = sectors.try_add(&k, n) {
                frontier.push((n, v));
            }
        }
    }
    let mut growth = vec![sectors.len];
    let mut rounds = 0;
    while !frontier.is_empty() {
        if rounds == max_iterations {
            return Err(Error::NoFixpoint {
                iterations: max_iterations,
                growth,
            });
        }
        rounds += 1;
        let mut next = Vec::new();
        for (_, v) in &frontier {
            for g in &parts {
                let w = g.apply(v, scheme.photon_cutoff);
                let photons = w.iter().next().map(|(l, _)| l.photon_number);
                if let Some(n) = photons {
                    if let Some(u) = sectors.try_add(&w, n) {
                        next.push((n, u));
                    }
                }
            }
        }
        frontier = next;
        growth.push(sectors.len);
    }
    let mut labels = Vec::with_capacity(sectors.len);
    let mut vectors = Vec::with_capacity(sectors.len);
    for (n, vs) in sectors.by_photons {
        for v in vs {
            labels.push(StateLabel::Span {
                index: labels.len(),
                photon_number: n,
            });
            vectors.push(v);
        }
    }
    Subspace::new(*scheme, labels, vectors)
}
