use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two pulses drives an atom: the first atom sees `Omega_01`,
/// all others share `Omega_02`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pump {
    First,
    Second,
}

impl Pump {
    pub fn of_atom(atom: usize) -> Self {
        if atom == 0 {
            Pump::First
        } else {
            Pump::Second
        }
    }
}

/// Gaussian pulse pair
///
/// ```text
/// Omega_01(t) = Omega0 [exp(-(t - tau)^2 / T^2) + exp(-(t + tau)^2 / T^2)]
/// Omega_02(t) = Omega0  exp(-(t - tau)^2 / T^2)
/// ```
///
/// so that `Omega_02 / Omega_01` rises from 0 at early times to 1 at late times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub omega0: f64,
    /// `T`
    pub width: f64,
    /// `tau`
    pub delay: f64,
}

impl PulsePair {
    pub fn new(omega0: f64, width: f64, delay: f64) -> Result<Self> {
        let p = Self { omega0, width, delay };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.omega0 > 0.0 && self.delay >= 0.0)
            || !(self.width.is_finite() && self.omega0.is_finite() && self.delay.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "pulse pair needs T > 0, Omega0 > 0, tau >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    fn lobe(&self, t: f64, center: f64) -> f64 {
        let x = (t - center) / self.width;
        (-x * x).exp()
    }

    pub fn omega01(&self, t: f64) -> f64 {
        self.omega0 * (self.lobe(t, self.delay) + self.lobe(t, -self.delay))
    }

    pub fn omega02(&self, t: f64) -> f64 {
        self.omega0 * self.lobe(t, self.delay)
    }

    pub fn value(&self, pump: Pump, t: f64) -> f64 {
        match pump {
            Pump::First => self.omega01(t),
            Pump::Second => self.omega02(t),
        }
    }
}

/// Couplings, detunings and level ratios for `N` atoms.
///
/// Index conventions are 0-based: `g[j][k]` is the cavity coupling of atom
/// `k` on `e_j <-> g_{j+1}`, `delta[j]` the common detuning `Delta_{j+1}` of
/// that level pair and `chi[j]` the ratio `B_{jk} / B_{0k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub g: Vec<Vec<f64>>,
    pub delta: Vec<f64>,
    pub chi: Vec<f64>,
    pub kappa: f64,
}

impl CouplingTable {
    /// One `g` and one `Delta` for every level and atom, `chi_j = 1`.
    pub fn uniform(n: usize, g: f64, delta: f64, kappa: f64) -> Self {
        let levels = n.saturating_sub(1);
        Self {
            g: vec![vec![g; n]; levels],
            delta: vec![delta; levels],
            chi: vec![1.0; levels],
            kappa,
        }
    }

    pub fn validate(&self, n: usize, omega0: f64) -> Result<()> {
        let levels = n.saturating_sub(1);
        if self.g.len() != levels || self.g.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!("coupling table must be {levels} x {n}")));
        }
        if self.delta.len() != levels || self.chi.len() != levels {
            return Err(Error::InvalidArgument(format!(
                "need {levels} detunings and {levels} chi ratios"
            )));
        }
        if self.delta.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidArgument("detunings must be positive and finite".into()));
        }
        if self.g.iter().flatten().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidArgument("cavity couplings must be positive and finite".into()));
        }
        if self.chi.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("chi ratios must be finite".into()));
        }
        if levels > 0 && self.chi[0] != 1.0 {
            return Err(Error::InvalidArgument(format!("chi_0 must be 1, got {}", self.chi[0])));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        let g_max = self.g.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        for (j, d) in self.delta.iter().enumerate() {
            if *d < 5.0 * omega0.max(g_max) {
                log::warn!(
                    "Delta_{} = {d} is not large against max(Omega0, g) = {}; adiabatic elimination is doubtful",
                    j + 1,
                    omega0.max(g_max)
                );
            }
        }
        Ok(())
    }
}

/// Everything the Hamiltonian builders need.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub pulses: PulsePair,
    pub couplings: CouplingTable,
    pub photon_cutoff: usize,
}

impl ModelParams {
    pub fn new(n: usize, pulses: PulsePair, couplings: CouplingTable, photon_cutoff: usize) -> Result<Self> {
        let p = Self {
            n,
            pulses,
            couplings,
            photon_cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    /// Uniform couplings with the smallest cutoff that holds the closed subspace.
    pub fn uniform(n: usize, pulses: PulsePair, g: f64, delta: f64, kappa: f64) -> Result<Self> {
        Self::new(n, pulses, CouplingTable::uniform(n, g, delta, kappa), n.saturating_sub(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("the protocol needs N >= 2, got {}", self.n)));
        }
        self.pulses.validate()?;
        self.couplings.validate(self.n, self.pulses.omega0)
    }

    fn check(&self, j: usize, k: usize) {
        assert!(
            j + 1 < self.n && k < self.n,
            "level {j} / atom {k} out of range for N = {}",
            self.n
        );
    }

    pub fn kappa(&self) -> f64 {
        self.couplings.kappa
    }

    /// Time-independent factor `r_{jk}` with `Omega_{jk}(t) = r_{jk} Omega_{0k}(t)`,
    /// chosen so that `B_{jk} = chi_j B_{0k}`.
    pub fn rabi_scale(&self, j: usize, k: usize) -> f64 {
        self.check(j, k);
        let c = &self.couplings;
        c.chi[j] * (c.g[0][k] / c.g[j][k]) * (c.delta[j] / c.delta[0])
    }

    /// `Omega_{jk}(t)`.
    pub fn rabi(&self, j: usize, k: usize, t: f64) -> f64 {
        self.rabi_scale(j, k) * self.pulses.value(Pump::of_atom(k), t)
    }

    /// `B_{jk}(t) = -Omega_{jk}(t) g_{j+1,k} / Delta_{j+1}`.
    pub fn coupling_b(&self, j: usize, k: usize, t: f64) -> f64 {
        -self.rabi(j, k, t) * self.couplings.g[j][k] / self.couplings.delta[j]
    }

    /// `A_{jk}(t) = -Omega_{jk}(t)^2 / Delta_{j+1}`.
    pub fn coupling_a(&self, j: usize, k: usize, t: f64) -> f64 {
        let o = self.rabi(j, k, t);
        -o * o / self.couplings.delta[j]
    }

    /// `G_{jk} = -g_{j+1,k}^2 / Delta_{j+1}`.
    pub fn coupling_g(&self, j: usize, k: usize) -> f64 {
        self.check(j, k);
        let g = self.couplings.g[j][k];
        -g * g / self.couplings.delta[j]
    }

    /// Constant `b_{jk}` with `B_{jk}(t) = b_{jk} Omega_{0k}(t)`.
    pub fn b_scale(&self, j: usize, k: usize) -> f64 {
        -self.rabi_scale(j, k) * self.couplings.g[j][k] / self.couplings.delta[j]
    }

    /// Constant `a_{jk}` with `A_{jk}(t) = a_{jk} Omega_{0k}(t)^2`.
    pub fn a_scale(&self, j: usize, k: usize) -> f64 {
        let r = self.rabi_scale(j, k);
        -r * r / self.couplings.delta[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ModelParams {
        ModelParams::uniform(3, PulsePair::new(1.0, 800.0, 400.0).unwrap(), 1.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn pulse_values_at_minus_tau() {
        let p = PulsePair::new(1.0, 800.0, 400.0).unwrap();
        let e = (-1.0f64).exp();
        assert!((p.omega01(-400.0) - (1.0 + e)).abs() < 1e-15);
        assert!((p.omega02(-400.0) - e).abs() < 1e-15);
    }

    #[test]
    fn pulse_values_at_plus_tau() {
        let p = PulsePair::new(1.0, 800.0, 400.0).unwrap();
        let e = (-1.0f64).exp();
        assert!((p.omega01(400.0) - (1.0 + e)).abs() < 1e-15);
        assert_eq!(p.omega02(400.0), 1.0);
        let ratio = p.omega02(400.0) / p.omega01(400.0);
        assert!((ratio - 1.0 / (1.0 + e)).abs() < 1e-15);
        assert!((ratio - 0.731).abs() < 1e-3);
    }

    #[test]
    fn pulse_ratio_limits() {
        let p = PulsePair::new(1.0, 800.0, 400.0).unwrap();
        let ratio = |t: f64| p.omega02(t) / p.omega01(t);
        // The limits are approached as exp(-4 |t| tau / T^2): e^{-10} at 5T, e^{-14} at 7T.
        let e10 = (-10.0f64).exp();
        assert!((ratio(-4000.0) - e10 / (1.0 + e10)).abs() < 1e-15);
        assert!((ratio(4000.0) - 1.0 / (1.0 + e10)).abs() < 1e-15);
        assert!(ratio(-5600.0) < 1e-6);
        assert!((ratio(5600.0) - 1.0).abs() < 1e-6);
        for t in [-3000.0, -100.0, 0.0, 2500.0] {
            assert!(p.omega01(t) >= 0.0 && p.omega02(t) >= 0.0);
        }
    }

    #[test]
    fn invalid_pulses_rejected() {
        assert!(PulsePair::new(1.0, 0.0, 1.0).is_err());
        assert!(PulsePair::new(0.0, 1.0, 1.0).is_err());
        assert!(PulsePair::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let m = defaults();
        // Omega_02 = Omega0 at t = tau.
        assert!((m.coupling_b(0, 1, 400.0) + 0.1).abs() < 1e-15);
        assert!((m.coupling_g(0, 0) + 0.1).abs() < 1e-15);
        for t in [-700.0, 0.0, 333.0] {
            for k in 0..3 {
                let b0 = m.coupling_b(0, k, t);
                assert_eq!(m.coupling_b(1, k, t), b0);
            }
        }
    }

    #[test]
    fn coefficients_consistent_with_raw_inputs() {
        let mut c = CouplingTable::uniform(4, 1.0, 10.0, 0.0);
        c.g[1][2] = 0.7;
        c.delta[2] = 13.0;
        c.chi = vec![1.0, 0.8, 1.3];
        let m = ModelParams::new(4, PulsePair::new(1.0, 50.0, 25.0).unwrap(), c, 3).unwrap();
        for t in [-80.0, -3.0, 0.0, 41.0] {
            for j in 0..3 {
                for k in 0..4 {
                    let raw = -m.rabi(j, k, t) * m.couplings.g[j][k] / m.couplings.delta[j];
                    assert_eq!(m.coupling_b(j, k, t), raw);
                    let via_chi = m.couplings.chi[j] * m.coupling_b(0, k, t);
                    assert!((m.coupling_b(j, k, t) - via_chi).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn table_validation() {
        let mut c = CouplingTable::uniform(3, 1.0, 10.0, 0.0);
        c.chi[0] = 0.5;
        assert!(c.validate(3, 1.0).is_err());
        let c = CouplingTable::uniform(3, 1.0, 10.0, -0.1);
        assert!(c.validate(3, 1.0).is_err());
        assert!(CouplingTable::uniform(3, 1.0, 10.0, 0.0).validate(4, 1.0).is_err());
    }
}
