use std::sync::Arc;

use nalgebra::DVector;

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::qspace::{BasisCatalog, StateLabel, StateVector};

/// Unnormalized weights `c_p` of `|zeta_{0,p+1}>`, `p = 0..N-1`:
///
/// ```text
/// c_p = (-1)^p (prod_{j<p} B_{j,1}) (prod_{m=p}^{N-2} B_{m,2})
/// ```
pub fn dark_weights(params: &ModelParams, t: f64) -> Vec<f64> {
    let n = params.n;
    let b1: Vec<f64> = (0..n - 1).map(|j| params.coupling_b(j, 0, t)).collect();
    let b2: Vec<f64> = (0..n - 1).map(|j| params.coupling_b(j, 1, t)).collect();
    (0..n)
        .map(|p| {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let left: f64 = b1[..p].iter().product();
            let right: f64 = b2[p..].iter().product();
            sign * left * right
        })
        .collect()
}

/// Normalized instantaneous dark state over a `zeta` catalog.
///
/// With both pulses off every weight vanishes; that is reported as
/// [`Error::ZeroVector`].
pub fn dark_state(params: &ModelParams, t: f64, zeta_catalog: &Arc<BasisCatalog>) -> Result<StateVector> {
    let weights = dark_weights(params, t);
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector(format!("dark state undefined at t = {t}: both couplings vanish")));
    }
    let mut amps = DVector::zeros(zeta_catalog.len());
    for (p, w) in weights.iter().enumerate() {
        let i = zeta_catalog
            .index_of(&StateLabel::Zeta { j: 0, m: p + 1 })
            .ok_or_else(|| Error::BasisMismatch(format!("zeta(0,{}) missing from catalog", p + 1)))?;
        amps[i] = C64::new(w / norm, 0.0);
    }
    StateVector::new(zeta_catalog.clone(), amps)
}
