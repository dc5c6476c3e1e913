use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::model::{dark_state, Hamiltonian, ModelParams};

/// Spectral gaps below this size are reported as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticPoint {
    pub t: f64,
    /// Distance from the dark-state eigenvalue to the nearest other one.
    pub gap: Option<f64>,
    /// `||d|D>/dt||`; since `<D|dD/dt> = 0` this is the total coupling out of `|D>`.
    pub coupling_rate: Option<f64>,
    /// Set where the dark state is undefined or the gap closes.
    pub degenerate: bool,
}

impl AdiabaticPoint {
    pub fn ratio(&self) -> Option<f64> {
        match (self.gap, self.coupling_rate) {
            (Some(g), Some(c)) if !self.degenerate => Some(c / g),
            _ => None,
        }
    }
}

/// Gap and non-adiabatic coupling of the dark state along `t_grid`, for a
/// Hamiltonian on a `zeta` catalog. `dt` is the central-difference step.
pub fn adiabaticity_report(h: &Hamiltonian, params: &ModelParams, t_grid: &[f64], dt: f64) -> Result<Vec<AdiabaticPoint>> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {dt}")));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let degenerate = AdiabaticPoint {
            t,
            gap: None,
            coupling_rate: None,
            degenerate: true,
        };
        let (d, dp, dm) = match (
            dark_state(params, t, h.basis()),
            dark_state(params, t + dt, h.basis()),
            dark_state(params, t - dt, h.basis()),
        ) {
            (Ok(d), Ok(p), Ok(m)) => (d, p, m),
            (Err(Error::ZeroVector(_)), ..) | (_, Err(Error::ZeroVector(_)), _) | (.., Err(Error::ZeroVector(_))) => {
                out.push(degenerate);
                continue;
            }
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return Err(e),
        };
        let rate = ((dp.amplitudes() - dm.amplitudes()) / crate::C64::new(2.0 * dt, 0.0)).norm();
        let (vals, vecs) = hermitian_eigen(&h.dense_at(t));
        let dark_index = (0..vals.len())
            .max_by(|&a, &b| {
                let oa = vecs.column(a).dotc(d.amplitudes()).norm();
                let ob = vecs.column(b).dotc(d.amplitudes()).norm();
                oa.total_cmp(&ob)
            })
            .expect("nonempty basis");
        let gap = (0..vals.len())
            .filter(|&i| i != dark_index)
            .map(|i| (vals[i] - vals[dark_index]).abs())
            .fold(f64::INFINITY, f64::min);
        out.push(AdiabaticPoint {
            t,
            gap: gap.is_finite().then_some(gap),
            coupling_rate: Some(rate),
            degenerate: !gap.is_finite() || gap < DEGENERATE_GAP,
        });
    }
    Ok(out)
}

/// Largest `coupling_rate / gap` over the non-degenerate points.
pub fn max_nonadiabaticity(points: &[AdiabaticPoint]) -> Option<f64> {
    points.iter().filter_map(AdiabaticPoint::ratio).reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_reduced_hamiltonian, PulsePair};

    fn params(n: usize, width: f64) -> ModelParams {
        ModelParams::uniform(n, PulsePair::new(1.0, width, width / 2.0).unwrap(), 1.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn pulses_off_is_degenerate() {
        let p = params(3, 800.0);
        let h = build_reduced_hamiltonian(&p).unwrap();
        let r = adiabaticity_report(&h, &p, &[1e7], 0.2).unwrap();
        assert!(r[0].degenerate);
        assert_eq!(r[0].ratio(), None);
    }

    #[test]
    fn gap_open_at_origin() {
        let p = params(3, 800.0);
        let h = build_reduced_hamiltonian(&p).unwrap();
        let r = adiabaticity_report(&h, &p, &[0.0], 0.2).unwrap();
        assert!(!r[0].degenerate);
        assert!(r[0].gap.unwrap() > 1e-3);
    }

    #[test]
    fn longer_pulses_are_more_adiabatic() {
        let grid: Vec<f64> = (0..=40).map(|i| -1.5 + 3.0 * i as f64 / 40.0).collect();
        let worst = |width: f64| {
            let p = params(3, width);
            let h = build_reduced_hamiltonian(&p).unwrap();
            let ts: Vec<f64> = grid.iter().map(|s| s * width).collect();
            max_nonadiabaticity(&adiabaticity_report(&h, &p, &ts, 0.2).unwrap()).unwrap()
        };
        assert!(worst(1200.0) < worst(600.0));
    }
}
