use nalgebra::DMatrix;

use super::density::{symmetrize_in_place, DensityMatrix};
use super::integrator::{integrate, IntegratorConfig, Rhs};
use super::schrodinger::{check_resolution, series_for, Diagnostics, Evolution};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, Csr, C64, I, ONE};
use crate::model::Hamiltonian;
use crate::observables::{measure_all, Probe, StateRef};
use crate::qspace::{same_catalog, BasisCatalog, Operator, PhotonOp, ProductOp, Subspace};

/// Largest tolerated leakage of `H` or a jump operator out of the basis.
pub const LEAKAGE_TOL: f64 = 1e-9;
/// Most negative tolerated eigenvalue of `rho`.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Collapse operator `L` (with its rate folded in) on the active basis.
#[derive(Clone, Debug)]
pub struct JumpOperator {
    pub name: String,
    pub rate: f64,
    pub matrix: Csr,
    pub leakage: f64,
}

fn annihilation() -> Operator {
    Operator::single(ProductOp::photon_only(PhotonOp::Annihilate))
}

impl JumpOperator {
    /// `sqrt(kappa) a` on a product catalog.
    pub fn cavity_decay(kappa: f64, catalog: &BasisCatalog) -> Result<Self> {
        check_rate(kappa)?;
        let m = annihilation().scaled(C64::new(kappa.sqrt(), 0.0)).to_csr(catalog)?;
        Ok(Self {
            name: "cavity_decay".into(),
            rate: kappa,
            matrix: m,
            leakage: 0.0,
        })
    }

    /// `sqrt(kappa) a` compressed onto a subspace, with its leakage recorded.
    pub fn cavity_decay_on(kappa: f64, subspace: &Subspace) -> Result<Self> {
        check_rate(kappa)?;
        let (m, leak) = annihilation().scaled(C64::new(kappa.sqrt(), 0.0)).project(subspace);
        Ok(Self {
            name: "cavity_decay".into(),
            rate: kappa,
            matrix: Csr::from_dense(&m),
            leakage: leak,
        })
    }

    pub fn is_null(&self) -> bool {
        self.matrix.nnz() == 0
    }
}

fn check_rate(kappa: f64) -> Result<()> {
    if kappa >= 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("decay rate must be nonnegative, got {kappa}")))
    }
}

/// `sum_k L_k^dagger L_k`.
pub(crate) fn decay_operator(n: usize, jumps: &[JumpOperator]) -> Csr {
    jumps
        .iter()
        .fold(Csr::zeros(n, n), |acc, l| acc.add_scaled(ONE, &l.matrix.adjoint().matmul(&l.matrix)))
}

/// Errors if `H` or a jump operator leaks out of the basis, or the bases differ.
pub(crate) fn check_closed(h: &Hamiltonian, jumps: &[JumpOperator]) -> Result<f64> {
    let mut leak = h.leakage();
    for j in jumps {
        if j.matrix.nrows() != h.dim() || j.matrix.ncols() != h.dim() {
            return Err(Error::BasisMismatch(format!("jump operator {} has the wrong dimension", j.name)));
        }
        leak = leak.max(j.leakage);
    }
    if leak > LEAKAGE_TOL {
        return Err(Error::BasisNotClosed {
            leakage: leak,
            tolerance: LEAKAGE_TOL,
        });
    }
    Ok(leak)
}

struct LindbladRhs<'a> {
    h: &'a Hamiltonian,
    jumps: &'a [JumpOperator],
    decay: Csr,
    n: usize,
    rho: DMatrix<C64>,
    x: DMatrix<C64>,
    z: DMatrix<C64>,
    symmetrization: f64,
}

impl Rhs for LindbladRhs<'_> {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    /// `drho = -i (K rho - rho K^dagger) + sum L rho L^dagger`, with
    /// `K = H - (i/2) sum L^dagger L`. Uses `rho K^dagger = (K rho)^dagger`
    /// and `L rho L^dagger = L (L rho)^dagger`, valid for Hermitian `rho`.
    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        let n = self.n;
        self.rho.as_mut_slice().copy_from_slice(y);
        self.x.fill(C64::new(0.0, 0.0));
        self.h.apply_dense_acc(t, ONE, &self.rho, &mut self.x);
        if self.decay.nnz() > 0 {
            self.decay.mul_dense_acc(C64::new(0.0, -0.5), &self.rho, &mut self.x);
        }
        for c in 0..n {
            for r in 0..n {
                dy[c * n + r] = -I * self.x[(r, c)] + I * self.x[(c, r)].conj();
            }
        }
        for l in self.jumps {
            if l.is_null() {
                continue;
            }
            self.x.fill(C64::new(0.0, 0.0));
            l.matrix.mul_dense_acc(ONE, &self.rho, &mut self.x);
            let y_adj = self.x.adjoint();
            self.z.fill(C64::new(0.0, 0.0));
            l.matrix.mul_dense_acc(ONE, &y_adj, &mut self.z);
            for (d, v) in dy.iter_mut().zip(self.z.as_slice()) {
                *d += v;
            }
        }
    }

    fn after_step(&mut self, _t: f64, y: &mut [C64]) -> Result<()> {
        let c = symmetrize_in_place(y, self.n);
        self.symmetrization = self.symmetrization.max(c);
        Ok(())
    }
}

/// Integrates the master equation
/// `drho/dt = -i[H, rho] + sum_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)`.
///
/// `rho` is symmetrized after every step and its spectrum is checked at every
/// sample; an eigenvalue below `-POSITIVITY_TOL` aborts the run.
pub fn evolve_lindblad(
    h: &Hamiltonian,
    jumps: &[JumpOperator],
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
    probes: &[Probe],
) -> Result<Evolution<DensityMatrix>> {
    if !same_catalog(h.basis(), rho0.basis()) {
        return Err(Error::BasisMismatch("initial state and Hamiltonian use different bases".into()));
    }
    rho0.validate(1e-10, 1e-8, 1e-8)?;
    let leakage = check_closed(h, jumps)?;
    check_resolution(h, cfg)?;
    let n = h.dim();
    let mut rhs = LindbladRhs {
        h,
        jumps,
        decay: decay_operator(n, jumps),
        n,
        rho: DMatrix::zeros(n, n),
        x: DMatrix::zeros(n, n),
        z: DMatrix::zeros(n, n),
        symmetrization: 0.0,
    };
    let mut series = series_for(probes);
    let mut drift: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let basis = h.basis().clone();
    let mut y: Vec<C64> = rho0.elements().as_slice().to_vec();
    let steps = integrate(&mut rhs, &mut y, cfg, |t, y| {
        let rho = DensityMatrix::new(basis.clone(), DMatrix::from_column_slice(n, n, y))?;
        let e = hermitian_eigen(rho.elements()).0[0];
        min_eig = min_eig.min(e);
        if e < -POSITIVITY_TOL {
            return Err(Error::Positivity { t, eigenvalue: e });
        }
        drift = drift.max((rho.trace() - 1.0).abs());
        series.push(t, &measure_all(probes, t, StateRef::Mixed(&rho))?)
    })?;
    if rhs.symmetrization > 1e-12 {
        log::debug!("lindblad symmetrization corrected up to {:e}", rhs.symmetrization);
    }
    Ok(Evolution {
        series,
        final_state: DensityMatrix::new(basis, DMatrix::from_vec(n, n, y))?,
        diagnostics: Diagnostics {
            steps,
            norm_drift: drift,
            symmetrization: rhs.symmetrization,
            min_eigenvalue: Some(min_eig),
            leakage,
            mean_jumps: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelKind, Profile, PulsePair};
    use crate::qspace::{BasisLabel, LevelScheme, StateLabel, StateVector};
    use std::sync::Arc;

    /// A bare cavity mode with `cutoff + 1` Fock states.
    fn fock(cutoff: usize) -> Arc<BasisCatalog> {
        let scheme = LevelScheme {
            n_parties: 1,
            n_ground: 1,
            n_excited: 0,
            photon_cutoff: cutoff,
        };
        Arc::new(BasisCatalog::product(&scheme).unwrap())
    }

    #[test]
    fn fock_decay_is_exponential() {
        let b = fock(3);
        let kappa = 0.3;
        let h = Hamiltonian::zero(b.clone(), PulsePair::new(1.0, 1.0, 0.0).unwrap());
        let l = JumpOperator::cavity_decay(kappa, &b).unwrap();
        let one = StateVector::from_label(b.clone(), &StateLabel::Product(BasisLabel::new(vec![0], 1))).unwrap();
        let cfg = IntegratorConfig::rk4(0.0, 5.0, 0.01).with_sample_every(50);
        let ev = evolve_lindblad(&h, &[l], &DensityMatrix::from_pure(&one), &cfg, &[Probe::PhotonMean, Probe::Trace]).unwrap();
        for (t, n) in ev.series.index.iter().zip(ev.series.column("photon_mean").unwrap()) {
            assert!((n - (-kappa * t).exp()).abs() < 1e-6);
        }
        assert!(ev.diagnostics.norm_drift < 1e-8);
        assert!(ev.diagnostics.min_eigenvalue.unwrap() > -1e-12);
    }

    #[test]
    fn leaky_basis_rejected() {
        let b = fock(1);
        let h = Hamiltonian::from_groups(
            b.clone(),
            ModelKind::EffectiveCompensated,
            PulsePair::new(1.0, 1.0, 0.0).unwrap(),
            vec![(Profile::Constant, Csr::identity(2))],
            1e-3,
        );
        let rho = DensityMatrix::from_pure(&StateVector::basis_state(b, 0).unwrap());
        let r = evolve_lindblad(&h, &[], &rho, &IntegratorConfig::rk4(0.0, 1.0, 0.1), &[]);
        assert!(matches!(r, Err(Error::BasisNotClosed { .. })));
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(JumpOperator::cavity_decay(-1.0, &fock(1)).is_err());
    }
}
