use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{dense_hermiticity_defect, hermitian_eigen, C64};
use crate::qspace::{BasisCatalog, StateVector};

/// Density matrix over a basis catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: Arc<BasisCatalog>,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(basis: Arc<BasisCatalog>, elements: DMatrix<C64>) -> Result<Self> {
        if elements.nrows() != basis.len() || elements.ncols() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{}x{} matrix for a basis of {} states",
                elements.nrows(),
                elements.ncols(),
                basis.len()
            )));
        }
        Ok(Self { basis, elements })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self {
            basis: psi.basis().clone(),
            elements: a * a.adjoint(),
        }
    }

    pub fn basis(&self) -> &Arc<BasisCatalog> {
        &self.basis
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        dense_hermiticity_defect(&self.elements)
    }

    /// Replaces `rho` by `(rho + rho^dagger) / 2`; returns the largest change.
    pub fn symmetrize(&mut self) -> f64 {
        let n = self.dim();
        symmetrize_in_place(self.elements.as_mut_slice(), n)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.elements).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Hermiticity, unit trace and positivity within the given tolerances.
    pub fn validate(&self, herm_tol: f64, trace_tol: f64, eig_tol: f64) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > herm_tol {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian ({h:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr}")));
        }
        let e = self.min_eigenvalue();
        if e < -eig_tol {
            return Err(Error::InvalidArgument(format!("density matrix eigenvalue {e:e}")));
        }
        Ok(())
    }
}

/// Symmetrizes a column-major `n x n` matrix; returns the largest change.
pub(crate) fn symmetrize_in_place(m: &mut [C64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..n {
        let d = &mut m[c * n + c];
        worst = worst.max(d.im.abs());
        d.im = 0.0;
        for r in c + 1..n {
            let (a, b) = (m[c * n + r], m[r * n + c]);
            let avg = (a + b.conj()) * 0.5;
            worst = worst.max((a - avg).norm());
            m[c * n + r] = avg;
            m[r * n + c] = avg.conj();
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspace::{BasisLabel, StateLabel};
    use nalgebra::DVector;

    fn basis(n: usize) -> Arc<BasisCatalog> {
        let labels = (0..n as u32).map(|k| StateLabel::Product(BasisLabel::new(vec![0], k))).collect();
        Arc::new(BasisCatalog::from_labels(labels, None).unwrap())
    }

    #[test]
    fn pure_state_projector() {
        let b = basis(3);
        let mut psi = StateVector::new(
            b.clone(),
            DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 0.5)]),
        )
        .unwrap();
        psi.normalize().unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        rho.validate(1e-14, 1e-14, 1e-14).unwrap();
        let e = rho.eigenvalues();
        assert!((e[2] - 1.0).abs() < 1e-12);
        assert!(e[0].abs() < 1e-12);
    }

    #[test]
    fn symmetrize_repairs_drift() {
        let b = basis(2);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.5, 1e-9), C64::new(0.1, 0.2), C64::new(0.1, -0.2 + 2e-9), C64::new(0.5, 0.0)],
        );
        let mut rho = DensityMatrix::new(b, m).unwrap();
        let c = rho.symmetrize();
        assert!(c > 0.0 && c < 3e-9);
        assert_eq!(rho.hermiticity_defect(), 0.0);
    }
}
