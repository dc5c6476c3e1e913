use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, Method, FULL_MODEL_STEP};
use crate::error::{Error, Result};
use crate::model::{CouplingTable, ModelParams, PulsePair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    /// Closed-form Hamiltonian on the `zeta` basis (dissipative runs use the
    /// effective model compressed onto the reachable span instead).
    Reduced,
    /// Ground-level model on the full tensor space.
    Effective,
    /// Model with the excited levels, on the full tensor space.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Schrödinger for `kappa = 0`; otherwise Lindblad up to `N = 4` and
    /// quantum jumps beyond.
    Auto,
    Schrodinger,
    Lindblad,
    Mcwf,
}

/// Every physical and numerical knob of one protocol run. Frequencies are in
/// units of `omega0`'s unit, times in its inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolParams {
    pub n: usize,
    pub omega0: f64,
    /// Pulse width `T`.
    pub pulse_width: f64,
    /// Pulse delay; `T / 2` when unset.
    pub tau: Option<f64>,
    pub g: f64,
    pub delta: f64,
    pub kappa: f64,
    /// `chi_j` for `j = 0..N-2`; all ones when unset.
    pub chi: Option<Vec<f64>>,
    /// Drop the laser Stark shifts.
    pub compensated: bool,
    pub model: ModelChoice,
    pub solver: SolverChoice,
    /// `N - 1` when unset.
    pub photon_cutoff: Option<usize>,
    /// Duration of the run, centred on `t = 0`; `5 T` when unset.
    pub t_final: Option<f64>,
    /// `0.2`, or `0.02 / Delta` for the full model, when unset.
    pub dt: Option<f64>,
    /// Approximate number of output samples.
    pub samples: usize,
    pub method: Method,
    /// Largest accepted change of the final fidelity when `dt` is halved.
    pub convergence_tol: Option<f64>,
    pub seed: u64,
    pub n_traj: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            n: 3,
            omega0: 1.0,
            pulse_width: 800.0,
            tau: None,
            g: 1.0,
            delta: 10.0,
            kappa: 0.0,
            chi: None,
            compensated: true,
            model: ModelChoice::Reduced,
            solver: SolverChoice::Auto,
            photon_cutoff: None,
            t_final: None,
            dt: None,
            samples: 1000,
            method: Method::Rk4,
            convergence_tol: Some(1e-6),
            seed: 20_240_601,
            n_traj: 2000,
        }
    }
}

/// Fields that can be swept.
pub const REAL_AXES: &[&str] = &["omega0", "pulse_width", "tau", "g", "delta", "kappa", "t_final", "dt"];

impl ProtocolParams {
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(self.pulse_width / 2.0)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or(5.0 * self.pulse_width)
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff.unwrap_or(self.n.saturating_sub(1))
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(match self.model {
            ModelChoice::Full => FULL_MODEL_STEP / self.delta,
            _ => 0.2,
        })
    }

    pub fn resolved_solver(&self) -> SolverChoice {
        match self.solver {
            SolverChoice::Auto if self.kappa == 0.0 => SolverChoice::Schrodinger,
            SolverChoice::Auto if self.n <= 4 => SolverChoice::Lindblad,
            SolverChoice::Auto => SolverChoice::Mcwf,
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        for (name, v) in [("omega0", self.omega0), ("pulse_width", self.pulse_width), ("g", self.g), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.tau() >= 0.0 && self.tau().is_finite()) {
            return bad(format!("tau must be nonnegative, got {}", self.tau()));
        }
        if !(self.t_final() >= 0.0 && self.t_final().is_finite()) {
            return bad(format!("t_final must be nonnegative, got {}", self.t_final()));
        }
        if !(self.dt() > 0.0 && self.dt().is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt()));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be nonnegative, got {}", self.kappa));
        }
        if let Some(chi) = &self.chi {
            if chi.len() != self.n - 1 {
                return bad(format!("chi needs {} entries, got {}", self.n - 1, chi.len()));
            }
        }
        if self.samples == 0 || self.n_traj == 0 {
            return bad("samples and n_traj must be positive".into());
        }
        if self.photon_cutoff() < self.n - 1 {
            return Err(Error::CutoffTooSmall {
                cutoff: self.photon_cutoff(),
                required: self.n - 1,
            });
        }
        if self.resolved_solver() == SolverChoice::Schrodinger && self.kappa > 0.0 {
            return bad("the Schrödinger solver cannot model kappa > 0".into());
        }
        self.model_params().map(|_| ())
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let mut c = CouplingTable::uniform(self.n, self.g, self.delta, self.kappa);
        if let Some(chi) = &self.chi {
            c.chi = chi.clone();
        }
        ModelParams::new(
            self.n,
            PulsePair::new(self.omega0, self.pulse_width, self.tau())?,
            c,
            self.photon_cutoff(),
        )
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let half = self.t_final() / 2.0;
        // `0.0 - half` keeps a zero-length window at +0.
        let cfg = IntegratorConfig::rk4(0.0 - half, half, self.dt()).with_method(self.method);
        let every = (cfg.steps() / self.samples).max(1);
        cfg.with_sample_every(every)
    }

    /// A copy with one real-valued field replaced.
    pub fn with_axis(&self, axis: &str, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("{axis} value {value} is not finite")));
        }
        let mut p = self.clone();
        match axis {
            "omega0" => p.omega0 = value,
            "pulse_width" => p.pulse_width = value,
            "tau" => p.tau = Some(value),
            "g" => p.g = value,
            "delta" => p.delta = value,
            "kappa" => p.kappa = value,
            "t_final" => p.t_final = Some(value),
            "dt" => p.dt = Some(value),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown sweep axis `{other}`; expected one of {}",
                    REAL_AXES.join(", ")
                )))
            }
        }
        Ok(p)
    }
}
