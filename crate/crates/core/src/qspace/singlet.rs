//! Totally antisymmetric states and the closed `zeta` basis built from them.

use std::sync::Arc;

use itertools::Itertools;

use super::basis::{BasisCatalog, BasisLabel, LevelScheme, StateLabel};
use super::ket::{Ket, StateVector};
use super::ops::{tensor_insert, Operator, PhotonOp, ProductOp};
use super::permutation::permutation_parity;
use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(1/sqrt(n!)) sum_perm sign(perm) |levels[perm[0]] ... levels[perm[n-1]]>`
/// with the photon label fixed. `levels` must be distinct.
pub fn antisymmetrized(levels: &[u8], photon_number: u32) -> Result<Ket> {
    if levels.iter().duplicates().next().is_some() {
        return Err(Error::InvalidArgument(format!("levels {levels:?} are not distinct")));
    }
    let n = levels.len();
    let amp = 1.0 / factorial(n).sqrt();
    let mut ket = Ket::new();
    for perm in (0..n).permutations(n) {
        let sign = permutation_parity(&perm)? as f64;
        let atoms = perm.iter().map(|&p| levels[p]).collect();
        ket.add(BasisLabel::new(atoms, photon_number), C64::new(sign * amp, 0.0));
    }
    Ok(ket)
}

/// The `n`-party singlet over ground levels `g_0..g_{n-1}`, cavity in vacuum.
pub fn singlet_ket(n: usize) -> Result<Ket> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("a singlet needs n >= 2 parties, got {n}")));
    }
    let levels: Vec<u8> = (0..n as u8).collect();
    antisymmetrized(&levels, 0)
}

/// `|S_n>` as a state vector over a product catalog of `n` atoms.
pub fn build_singlet(n: usize, basis: &Arc<BasisCatalog>) -> Result<StateVector> {
    let scheme = basis
        .scheme()
        .ok_or_else(|| Error::BasisMismatch("singlet needs a product catalog".into()))?;
    if scheme.n_parties != n {
        return Err(Error::BasisMismatch(format!(
            "basis has {} atoms, singlet needs {n}",
            scheme.n_parties
        )));
    }
    if scheme.n_ground < n {
        return Err(Error::InvalidArgument(format!(
            "{} ground levels cannot hold an {n}-party singlet",
            scheme.n_ground
        )));
    }
    StateVector::from_ket(&singlet_ket(n)?, basis.clone())
}

/// `sum_atoms sum_j |g_{j+1}><g_j|` over `n_atoms` atoms with `n_levels` ground levels.
pub fn collective_raising(n_atoms: usize, n_levels: usize) -> Operator {
    let mut terms = Vec::new();
    for atom in 0..n_atoms {
        for j in 0..n_levels.saturating_sub(1) {
            terms.push(ProductOp::local(atom, (j + 1) as u8, j as u8, PhotonOp::Identity));
        }
    }
    Operator::new(terms)
}

/// Normalized `(sigma^+)^q |S_{n,0}>` together with its raw norm.
#[derive(Clone, Debug)]
pub struct ShiftedSinglet {
    pub ket: Ket,
    /// `|| (sigma^+)^q |S_{n,0}> ||` before normalization.
    pub raw_norm: f64,
}

/// Applies the collective raising operator `q` times to the antisymmetric
/// state of `n_atoms` atoms over levels `0..n_atoms`, inside a ladder of
/// `n_levels` ground levels.
///
/// A raising sequence that annihilates the state is reported as
/// [`Error::ZeroVector`], distinct from argument errors.
pub fn shifted_singlet(n_atoms: usize, n_levels: usize, q: usize) -> Result<ShiftedSinglet> {
    if n_atoms == 0 || n_levels < n_atoms {
        return Err(Error::InvalidArgument(format!(
            "{n_atoms} atoms need at least as many of the {n_levels} levels"
        )));
    }
    let base: Vec<u8> = (0..n_atoms as u8).collect();
    let mut ket = antisymmetrized(&base, 0)?;
    let raise = collective_raising(n_atoms, n_levels);
    for step in 0..q {
        ket = raise.apply(&ket, 0);
        if ket.is_empty() {
            return Err(Error::ZeroVector(format!(
                "raising {n_atoms} antisymmetrized atoms {} times in {n_levels} levels gives zero",
                step + 1
            )));
        }
    }
    let (ket, raw_norm) = ket.normalized()?;
    Ok(ShiftedSinglet { ket, raw_norm })
}

/// Effective-model level scheme that holds the closed subspace of `n` parties.
pub fn zeta_scheme(n: usize) -> LevelScheme {
    LevelScheme::effective(n, n.saturating_sub(1))
}

/// `|zeta_{j,m}> = |g_{j+m-1}>_1 |S_{N-1,N-m}> |j>` for `0 <= j <= N-1`,
/// `1 <= m <= N-j`, ordered by `(j, m)`.
pub fn zeta_basis(n: usize) -> Result<Subspace> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("the protocol needs N >= 2, got {n}")));
    }
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for j in 0..n {
        for m in 1..=n - j {
            labels.push(StateLabel::Zeta { j, m });
            vectors.push(zeta_ket(n, j, m)?);
        }
    }
    Subspace::new(zeta_scheme(n), labels, vectors)
}

/// A single `|zeta_{j,m}>` as an embedded ket.
pub fn zeta_ket(n: usize, j: usize, m: usize) -> Result<Ket> {
    if n < 2 || m < 1 || j + m > n {
        return Err(Error::InvalidArgument(format!(
            "zeta({j},{m}) outside 0 <= j <= N-1, 1 <= m <= N-j for N = {n}"
        )));
    }
    let rest = shifted_singlet(n - 1, n, n - m)?.ket;
    let mut first = vec![ZERO; n];
    first[j + m - 1] = ONE;
    let ket = tensor_insert(&first, 0, &rest)?;
    Ok(ket.map_labels(|l| BasisLabel::new(l.atom_levels.clone(), j as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use nalgebra::{DMatrix, DVector};

    fn amp(k: &Ket, levels: &[u8]) -> C64 {
        k.get(&BasisLabel::new(levels.to_vec(), 0))
    }

    #[test]
    fn two_party_singlet() {
        let s = singlet_ket(2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((amp(&s, &[0, 1]).re - r).abs() < 1e-15);
        assert!((amp(&s, &[1, 0]).re + r).abs() < 1e-15);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn three_party_singlet_signs() {
        let s = singlet_ket(3).unwrap();
        let r = 1.0 / 6f64.sqrt();
        assert!((amp(&s, &[0, 1, 2]).re - r).abs() < 1e-15);
        assert!((amp(&s, &[0, 2, 1]).re + r).abs() < 1e-15);
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|(_, a)| (a.norm() - r).abs() < 1e-15));
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singlet_argument_errors() {
        assert!(singlet_ket(1).is_err());
        let scheme = LevelScheme {
            n_parties: 3,
            n_ground: 2,
            n_excited: 0,
            photon_cutoff: 0,
        };
        let basis = Arc::new(BasisCatalog::product(&scheme).unwrap());
        assert!(matches!(build_singlet(3, &basis), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_singlet(2, &basis), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn shifted_base_case_is_singlet() {
        let s = shifted_singlet(2, 3, 0).unwrap();
        let mut diff = s.ket.clone();
        diff.axpy(C64::new(-1.0, 0.0), &singlet_ket(2).unwrap());
        assert!(diff.norm() < 1e-15);
        assert!((s.raw_norm - 1.0).abs() < 1e-15);
    }

    /// Oracle: build sigma^+ as a dense Kronecker sum on C^3 (x) C^3 and apply it.
    #[test]
    fn shifted_matches_dense_raising() {
        let l = 3usize;
        let mut up = DMatrix::<C64>::zeros(l, l);
        for j in 0..l - 1 {
            up[(j + 1, j)] = ONE;
        }
        let id = DMatrix::<C64>::identity(l, l);
        let sigma = up.kronecker(&id) + id.kronecker(&up);
        let r = 1.0 / 2f64.sqrt();
        // Index of |a b> is a * 3 + b.
        let mut base = DVector::<C64>::zeros(l * l);
        base[1] = C64::new(r, 0.0);
        base[3] = C64::new(-r, 0.0);
        let raised = &sigma * &base;
        let norm = raised.norm();
        let expected = raised / C64::new(norm, 0.0);

        let s = shifted_singlet(2, 3, 1).unwrap();
        assert!((s.raw_norm - norm).abs() < 1e-14);
        for a in 0..l {
            for b in 0..l {
                let got = amp(&s.ket, &[a as u8, b as u8]);
                assert!((got - expected[a * l + b]).norm() < 1e-14, "({a},{b})");
            }
        }
        // The |g_1 g_1> components cancel.
        assert_eq!(amp(&s.ket, &[1, 1]), ZERO);
    }

    #[test]
    fn raising_past_the_top_is_zero_vector() {
        assert!(shifted_singlet(2, 3, 2).is_ok());
        assert!(matches!(shifted_singlet(2, 3, 3), Err(Error::ZeroVector(_))));
        assert!(matches!(shifted_singlet(3, 2, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zeta_counts_and_initial_state() {
        for n in 2..=5 {
            let z = zeta_basis(n).unwrap();
            assert_eq!(z.len(), n * (n + 1) / 2);
            assert!(z.orthonormality_defect() < 1e-12);
        }
        let z = zeta_basis(3).unwrap();
        let init = z.vector(&StateLabel::Zeta { j: 0, m: 3 }).unwrap();
        let r = 1.0 / 2f64.sqrt();
        // |g_2>|S_{2,0}>|0> = |g_2>(|g_0 g_1> - |g_1 g_0>)/sqrt(2)
        assert!((amp(init, &[2, 0, 1]).re - r).abs() < 1e-15);
        assert!((amp(init, &[2, 1, 0]).re + r).abs() < 1e-15);
        assert_eq!(init.len(), 2);
        assert!(zeta_ket(3, 1, 3).is_err());
    }
}
