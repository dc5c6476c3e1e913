use std::sync::Arc;

use super::hamiltonian::{Closure, Hamiltonian, ModelKind, Profile, Term, TermList};
use super::params::{ModelParams, Pump};
use crate::error::{Error, Result};
use crate::linalg::{Csr, C64};
use crate::qspace::{zeta_basis, BasisCatalog, LevelScheme, Operator, PhotonOp, ProductOp, StateLabel};

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Photon numbers up to `N - 1` are reachable from the initial state.
fn require_cutoff(params: &ModelParams) -> Result<()> {
    let required = params.n - 1;
    if params.photon_cutoff < required {
        return Err(Error::CutoffTooSmall {
            cutoff: params.photon_cutoff,
            required,
        });
    }
    Ok(())
}

/// Adiabatically eliminated model on ground levels only:
///
/// ```text
/// H_e = sum_k sum_j [ A_jk |g_j><g_j| + G_jk |g_{j+1}><g_{j+1}| a^dagger a
///                     + (B_jk |g_{j+1}><g_j| a^dagger + H.c.) ]
/// ```
///
/// With `compensated` the laser Stark shifts `A_jk` are dropped.
pub fn effective_terms(params: &ModelParams, compensated: bool) -> Result<TermList> {
    params.validate()?;
    require_cutoff(params)?;
    let n = params.n;
    let scheme = LevelScheme::effective(n, params.photon_cutoff);
    let mut terms = Vec::new();
    for k in 0..n {
        let pump = Pump::of_atom(k);
        for j in 0..n - 1 {
            let (lo, hi) = (scheme.ground(j), scheme.ground(j + 1));
            terms.push(Term {
                profile: Profile::Pulse(pump),
                op: Operator::single(ProductOp::local(k, hi, lo, PhotonOp::Create).scaled(real(params.b_scale(j, k)))),
                closure: Closure::AddConjugate,
            });
            terms.push(Term {
                profile: Profile::Constant,
                op: Operator::single(ProductOp::local(k, hi, hi, PhotonOp::Number).scaled(real(params.coupling_g(j, k)))),
                closure: Closure::SelfAdjoint,
            });
            if !compensated {
                terms.push(Term {
                    profile: Profile::PulseSquared(pump),
                    op: Operator::single(
                        ProductOp::local(k, lo, lo, PhotonOp::Identity).scaled(real(params.a_scale(j, k))),
                    ),
                    closure: Closure::SelfAdjoint,
                });
            }
        }
    }
    Ok(TermList {
        scheme,
        pulses: params.pulses,
        kind: if compensated {
            ModelKind::EffectiveCompensated
        } else {
            ModelKind::EffectiveWithStark
        },
        terms,
    })
}

pub fn build_effective_hamiltonian(params: &ModelParams, compensated: bool) -> Result<Hamiltonian> {
    effective_terms(params, compensated)?.on_product_space()
}

/// Interaction-picture model with the excited levels kept:
///
/// ```text
/// H_I = sum_k sum_j [ Omega_jk(t) |e_j><g_j| e^{i Delta_{j+1} t}
///                     + g_{j+1,k} |g_{j+1}><e_j| a^dagger e^{-i Delta_{j+1} t} ] + H.c.
/// ```
pub fn full_terms(params: &ModelParams) -> Result<TermList> {
    params.validate()?;
    require_cutoff(params)?;
    let n = params.n;
    let scheme = LevelScheme::full(n, params.photon_cutoff);
    let mut terms = Vec::new();
    for k in 0..n {
        let pump = Pump::of_atom(k);
        for j in 0..n - 1 {
            let delta = params.couplings.delta[j];
            let (g_lo, g_hi, e) = (scheme.ground(j), scheme.ground(j + 1), scheme.excited(j));
            terms.push(Term {
                profile: Profile::PulsePhase(pump, delta),
                op: Operator::single(ProductOp::local(k, e, g_lo, PhotonOp::Identity).scaled(real(params.rabi_scale(j, k)))),
                closure: Closure::AddConjugate,
            });
            terms.push(Term {
                profile: Profile::Phase(-delta),
                op: Operator::single(
                    ProductOp::local(k, g_hi, e, PhotonOp::Create).scaled(real(params.couplings.g[j][k])),
                ),
                closure: Closure::AddConjugate,
            });
        }
    }
    Ok(TermList {
        scheme,
        pulses: params.pulses,
        kind: ModelKind::Full,
        terms,
    })
}

pub fn build_full_hamiltonian(params: &ModelParams) -> Result<Hamiltonian> {
    full_terms(params)?.on_product_space()
}

/// Copy of `params` with the cutoff the closed subspace lives in.
fn zeta_params(params: &ModelParams) -> ModelParams {
    ModelParams {
        photon_cutoff: params.n - 1,
        ..params.clone()
    }
}

/// `P H_e P` in the `zeta` basis, with `H_e` the compensated effective model.
pub fn reduced_projection_oracle(params: &ModelParams) -> Result<Hamiltonian> {
    let zeta = zeta_basis(params.n)?;
    effective_terms(&zeta_params(params), true)?.project(&zeta)
}

/// Closed-form Hamiltonian on the `zeta` catalog.
///
/// ```text
/// <zeta_{j,m}| H |zeta_{j,m}>     = j * (sum of G over the excited ground levels)
///                                 = G N j (m = 1),  G (N-1) j (m >= 2) for uniform G
/// <zeta_{j,m}| H |zeta_{j+1,m}>   = sqrt(j+1) B_{j+m-1, 1}   (first atom absorbs)
/// <zeta_{j,m+1}| H |zeta_{j+1,m}> = sqrt(j+1) B_{m-1, 2}     (atoms 2..N absorb)
/// ```
///
/// In the second coupling the level index is `m - 1` and the atom is any of
/// `2..N`: raising `|S_{N-1,N-m-1}>` (which lacks level `m`) to
/// `|S_{N-1,N-m}>` (which lacks `m - 1`) moves exactly one atom from `g_{m-1}`
/// to `g_m`.
pub fn reduced_analytic(params: &ModelParams, catalog: Arc<BasisCatalog>) -> Result<Hamiltonian> {
    params.validate()?;
    let n = params.n;
    let idx = |j: usize, m: usize| {
        catalog
            .index_of(&StateLabel::Zeta { j, m })
            .ok_or_else(|| Error::BasisMismatch(format!("zeta({j},{m}) missing from catalog")))
    };
    let dim = n * (n + 1) / 2;
    if catalog.len() != dim {
        return Err(Error::BasisMismatch(format!("zeta catalog for N = {n} must have {dim} states")));
    }

    let mut diag = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for j in 0..n {
        for m in 1..=n - j {
            let here = idx(j, m)?;
            // Stark shift: G for every atom above g_0, times the photon number.
            let first_level = j + m - 1;
            let missing = m - 1;
            let mut shift = if first_level >= 1 { params.coupling_g(first_level - 1, 0) } else { 0.0 };
            for level in (1..n).filter(|&l| l != missing) {
                shift += params.coupling_g(level - 1, 1);
            }
            diag.push((here, here, real(j as f64 * shift)));

            if m + j < n {
                let up = idx(j + 1, m)?;
                let root = ((j + 1) as f64).sqrt();
                first.push((here, up, real(root * params.b_scale(j + m - 1, 0))));
                first.push((up, here, real(root * params.b_scale(j + m - 1, 0))));
                let side = idx(j, m + 1)?;
                second.push((side, up, real(root * params.b_scale(m - 1, 1))));
                second.push((up, side, real(root * params.b_scale(m - 1, 1))));
            }
        }
    }
    let groups = vec![
        (Profile::Constant, Csr::from_triplets(dim, dim, diag)),
        (Profile::Pulse(Pump::First), Csr::from_triplets(dim, dim, first)),
        (Profile::Pulse(Pump::Second), Csr::from_triplets(dim, dim, second)),
    ];
    Ok(Hamiltonian::from_groups(catalog, ModelKind::ReducedSubspace, params.pulses, groups, 0.0))
}

/// Element-wise comparison of two Hamiltonians on the same catalog. Returns
/// the largest deviation, or a consistency error naming the first element
/// beyond `tol`.
pub fn compare_hamiltonians(built: &Hamiltonian, oracle: &Hamiltonian, times: &[f64], tol: f64) -> Result<f64> {
    if built.basis().labels() != oracle.basis().labels() {
        return Err(Error::BasisMismatch("compared Hamiltonians use different catalogs".into()));
    }
    let mut worst: f64 = 0.0;
    for &t in times {
        let a = built.dense_at(t);
        let b = oracle.dense_at(t);
        for c in 0..a.ncols() {
            for r in 0..a.nrows() {
                let diff = (a[(r, c)] - b[(r, c)]).norm();
                if diff > tol {
                    return Err(Error::ModelConsistency {
                        row: built.basis().label(r).to_string(),
                        col: built.basis().label(c).to_string(),
                        t,
                        built: format!("{}", a[(r, c)]),
                        oracle: format!("{}", b[(r, c)]),
                        diff,
                    });
                }
                worst = worst.max(diff);
            }
        }
    }
    Ok(worst)
}

/// Tolerance of the build-time check of the closed form against its oracle.
pub const REDUCED_ORACLE_TOL: f64 = 1e-9;

/// Reduced model on the `zeta` catalog, checked against the projection
/// oracle at `t = -tau, 0, tau` and at the pulse peaks before it is returned.
pub fn build_reduced_hamiltonian(params: &ModelParams) -> Result<Hamiltonian> {
    let oracle = reduced_projection_oracle(params)?;
    if oracle.leakage() > REDUCED_ORACLE_TOL {
        return Err(Error::BasisNotClosed {
            leakage: oracle.leakage(),
            tolerance: REDUCED_ORACLE_TOL,
        });
    }
    let built = reduced_analytic(params, oracle.basis().clone())?;
    let tau = params.pulses.delay;
    let w = params.pulses.width;
    compare_hamiltonians(&built, &oracle, &[-tau, 0.0, tau, -tau - 0.3 * w, tau + 0.7 * w], REDUCED_ORACLE_TOL)?;
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingTable, PulsePair};
    use crate::qspace::{BasisLabel, StateLabel};

    fn defaults(n: usize) -> ModelParams {
        ModelParams::uniform(n, PulsePair::new(1.0, 800.0, 400.0).unwrap(), 1.0, 10.0, 0.0).unwrap()
    }

    fn irregular(n: usize) -> ModelParams {
        let mut c = CouplingTable::uniform(n, 1.0, 10.0, 0.0);
        for j in 0..n - 1 {
            c.chi[j] = 1.0 + 0.17 * j as f64;
            c.delta[j] = 10.0 + 1.5 * j as f64;
            for k in 0..n {
                c.g[j][k] = if k == 0 { 1.0 + 0.05 * j as f64 } else { 0.9 + 0.03 * j as f64 };
            }
        }
        ModelParams::new(n, PulsePair::new(1.0, 60.0, 30.0).unwrap(), c, n - 1).unwrap()
    }

    fn prod(levels: &[u8], n: u32) -> StateLabel {
        StateLabel::Product(BasisLabel::new(levels.to_vec(), n))
    }

    #[test]
    fn full_model_without_drives_is_zero() {
        // Pulses far in the past underflow to zero, but the cavity coupling
        // remains; use an explicitly zero Hamiltonian comparison on the drive group.
        let p = defaults(2);
        let h = build_full_hamiltonian(&p).unwrap();
        let zero_drive = h.filtered(|pr| !matches!(pr, Profile::Phase(_)));
        assert_eq!(zero_drive.matrix_at(-1e7).nnz(), 0);
    }

    #[test]
    fn full_model_drive_element() {
        let p = ModelParams {
            photon_cutoff: 1,
            ..defaults(2)
        };
        let h = build_full_hamiltonian(&p).unwrap();
        let b = h.basis();
        let s = LevelScheme::full(2, 1);
        let t = 123.4;
        let m = h.matrix_at(t);
        // atom 0: g_0 -> e_0, atom 1 spectating in g_1, one photon.
        let from = b.index_of(&prod(&[0, 1], 1)).unwrap();
        let to = b.index_of(&prod(&[s.excited(0), 1], 1)).unwrap();
        let expected = C64::from_polar(p.rabi(0, 0, t), 10.0 * t);
        assert!((m.get(to, from) - expected).norm() < 1e-14);
        let cav_from = b.index_of(&prod(&[s.excited(0), 1], 0)).unwrap();
        let cav_to = b.index_of(&prod(&[1, 1], 1)).unwrap();
        let expected = C64::from_polar(1.0, -10.0 * t);
        assert!((m.get(cav_to, cav_from) - expected).norm() < 1e-14);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let p = defaults(3);
        let full = build_full_hamiltonian(&p).unwrap();
        let eff = build_effective_hamiltonian(&p, false).unwrap();
        for i in 0..100 {
            let t = -2000.0 + 40.0 * i as f64 + 0.37;
            assert!(full.matrix_at(t).hermiticity_defect() <= 1e-12);
            assert!(eff.matrix_at(t).hermiticity_defect() <= 1e-12);
        }
    }

    #[test]
    fn effective_single_atom_elements() {
        let p = ModelParams {
            photon_cutoff: 3,
            ..defaults(2)
        };
        let h = build_effective_hamiltonian(&p, true).unwrap();
        let b = h.basis();
        let t = 50.0;
        let m = h.matrix_at(t);
        for n in 0..3u32 {
            let from = b.index_of(&prod(&[0, 0], n)).unwrap();
            let to = b.index_of(&prod(&[1, 0], n + 1)).unwrap();
            let expected = ((n + 1) as f64).sqrt() * p.coupling_b(0, 0, t);
            assert!((m.get(to, from).re - expected).abs() < 1e-15);
            let diag = b.index_of(&prod(&[1, 0], n)).unwrap();
            assert!((m.get(diag, diag).re - p.coupling_g(0, 0) * n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn effective_without_drive_is_diagonal() {
        let p = defaults(3);
        let h = build_effective_hamiltonian(&p, false).unwrap();
        let m = h.matrix_at(1e7);
        assert!(m.nnz() > 0);
        assert!(m.iter().all(|(r, c, _)| r == c));
    }

    #[test]
    fn cutoff_checked() {
        let p = ModelParams {
            photon_cutoff: 1,
            ..defaults(3)
        };
        assert!(matches!(
            build_effective_hamiltonian(&p, true),
            Err(Error::CutoffTooSmall { cutoff: 1, required: 2 })
        ));
    }

    #[test]
    fn reduced_diagonal_matches_closed_form() {
        for n in 3..=5 {
            let p = defaults(n);
            let h = build_reduced_hamiltonian(&p).unwrap();
            let m = h.matrix_at(0.0);
            let g = p.coupling_g(0, 0);
            for j in 0..n {
                for mm in 1..=n - j {
                    let i = h.basis().index_of(&StateLabel::Zeta { j, m: mm }).unwrap();
                    let expected = if mm == 1 { g * (n * j) as f64 } else { g * ((n - 1) * j) as f64 };
                    assert!((m.get(i, i).re - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn reduced_matches_oracle_with_irregular_couplings() {
        // Non-uniform chi, g and Delta separate every level and atom index.
        for n in 3..=4 {
            let p = irregular(n);
            let oracle = reduced_projection_oracle(&p).unwrap();
            assert!(oracle.leakage() < 1e-12, "leakage {}", oracle.leakage());
            let built = reduced_analytic(&p, oracle.basis().clone()).unwrap();
            let times: Vec<f64> = (0..7).map(|i| -90.0 + 30.0 * i as f64).collect();
            let dev = compare_hamiltonians(&built, &oracle, &times, 1e-12).unwrap();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn printed_atom_index_disagrees_with_oracle() {
        // Coupling the (j, m+1) -> (j+1, m) pair with the first atom's B, as
        // printed, is rejected by the oracle with a located diagnostic.
        let p = defaults(3);
        let oracle = reduced_projection_oracle(&p).unwrap();
        let good = reduced_analytic(&p, oracle.basis().clone()).unwrap();
        let b = oracle.basis().clone();
        let mut groups: Vec<(Profile, Csr)> = good.groups().to_vec();
        let second = groups.iter().position(|(pr, _)| *pr == Profile::Pulse(Pump::Second)).unwrap();
        let moved = groups.remove(second).1;
        let first = groups.iter().position(|(pr, _)| *pr == Profile::Pulse(Pump::First)).unwrap();
        groups[first].1 = groups[first].1.add_scaled(C64::new(1.0, 0.0), &moved);
        let printed = Hamiltonian::from_groups(b, ModelKind::ReducedSubspace, p.pulses, groups, 0.0);
        let err = compare_hamiltonians(&printed, &oracle, &[0.0], 1e-9).unwrap_err();
        assert!(matches!(err, Error::ModelConsistency { .. }), "{err}");
    }
}
