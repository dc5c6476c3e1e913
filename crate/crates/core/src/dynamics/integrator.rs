use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4,
    /// Adaptive Dormand–Prince 5(4) pair.
    DormandPrince,
}

/// Time grid and stepping rule for one integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step for [`Method::Rk4`]; initial step for the adaptive method.
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Keep every `sample_every`-th step (the last step is always kept).
    pub sample_every: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl IntegratorConfig {
    pub fn rk4(t_start: f64, t_end: f64, dt: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            t_start,
            t_end,
            sample_every: 1,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }

    pub fn with_sample_every(mut self, k: usize) -> Self {
        self.sample_every = k;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_end < self.t_start {
            return bad(format!("invalid time span [{}, {}]", self.t_start, self.t_end));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// Number of fixed steps; the step is shrunk so the grid ends at `t_end`.
    pub fn steps(&self) -> usize {
        let span = self.t_end - self.t_start;
        if span <= 0.0 {
            return 0;
        }
        ((span / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn step_size(&self) -> f64 {
        match self.steps() {
            0 => 0.0,
            s => (self.t_end - self.t_start) / s as f64,
        }
    }

    fn step_time(&self, i: usize, steps: usize) -> f64 {
        if i == steps {
            self.t_end
        } else {
            self.t_start + i as f64 * self.step_size()
        }
    }

    fn is_sample(&self, i: usize, steps: usize) -> bool {
        i % self.sample_every == 0 || i == steps
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let s = self.steps();
        (0..=s).filter(|&i| self.is_sample(i, s)).map(|i| self.step_time(i, s)).collect()
    }

    /// Half the step on the same sample times.
    pub fn refined(&self) -> Self {
        Self {
            dt: self.step_size().max(f64::MIN_POSITIVE) / 2.0,
            sample_every: self.sample_every * 2,
            rtol: self.rtol / 32.0,
            atol: self.atol / 32.0,
            ..*self
        }
    }
}

/// Right-hand side `dy/dt = f(t, y)` of a first-order system.
pub trait Rhs {
    fn dim(&self) -> usize;

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]);

    /// Hook run after every accepted step (projection, jumps).
    fn after_step(&mut self, _t: f64, _y: &mut [C64]) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn check_finite(t: f64, y: &[C64]) -> Result<()> {
    if y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Integrates `y` in place, calling `on_sample(t, y)` on the sample grid
/// (including `t_start`).
pub fn integrate<R, F>(rhs: &mut R, y: &mut [C64], cfg: &IntegratorConfig, mut on_sample: F) -> Result<StepStats>
where
    R: Rhs,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    cfg.validate()?;
    if y.len() != rhs.dim() {
        return Err(Error::BasisMismatch(format!(
            "state of length {} for a system of dimension {}",
            y.len(),
            rhs.dim()
        )));
    }
    check_finite(cfg.t_start, y)?;
    on_sample(cfg.t_start, y)?;
    match cfg.method {
        Method::Rk4 => integrate_rk4(rhs, y, cfg, on_sample),
        Method::DormandPrince => integrate_dopri(rhs, y, cfg, on_sample),
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(&[C64], f64)]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

fn integrate_rk4<R, F>(rhs: &mut R, y: &mut [C64], cfg: &IntegratorConfig, mut on_sample: F) -> Result<StepStats>
where
    R: Rhs,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let steps = cfg.steps();
    let h = cfg.step_size();
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    for i in 1..=steps {
        let t = cfg.step_time(i - 1, steps);
        rhs.eval(t, y, &mut k1);
        axpy_into(&mut tmp, y, 0.5 * h, &[(&k1, 1.0)]);
        rhs.eval(t + 0.5 * h, &tmp, &mut k2);
        axpy_into(&mut tmp, y, 0.5 * h, &[(&k2, 1.0)]);
        rhs.eval(t + 0.5 * h, &tmp, &mut k3);
        axpy_into(&mut tmp, y, h, &[(&k3, 1.0)]);
        rhs.eval(t + h, &tmp, &mut k4);
        for j in 0..n {
            y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
        let t_new = cfg.step_time(i, steps);
        check_finite(t_new, y)?;
        rhs.after_step(t_new, y)?;
        if cfg.is_sample(i, steps) {
            on_sample(t_new, y)?;
        }
    }
    Ok(StepStats {
        accepted: steps,
        rejected: 0,
    })
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn integrate_dopri<R, F>(rhs: &mut R, y: &mut [C64], cfg: &IntegratorConfig, mut on_sample: F) -> Result<StepStats>
where
    R: Rhs,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut stats = StepStats::default();
    let times = cfg.sample_times();
    let mut h = cfg.dt;
    let mut t = cfg.t_start;
    for &target in times.iter().skip(1) {
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            for s in 0..7 {
                for i in 0..n {
                    let mut acc = zero;
                    for (r, ks) in k.iter().enumerate().take(s) {
                        acc += ks[i] * DP_A[s][r];
                    }
                    tmp[i] = y[i] + acc * step;
                }
                rhs.eval(t + DP_C[s] * step, &tmp, &mut k[s]);
            }
            // The last stage is evaluated at the fifth-order solution, held in `tmp`.
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = zero;
                for s in 0..7 {
                    e += k[s][i] * (DP_B5[s] - DP_B4[s]);
                }
                let scale = cfg.atol + cfg.rtol * y[i].norm().max(tmp[i].norm());
                err = err.max((e * step).norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::NonFinite { t });
            }
            if err <= 1.0 {
                y.copy_from_slice(&tmp);
                t = if last { target } else { t + step };
                stats.accepted += 1;
                rhs.after_step(t, y)?;
                if !last {
                    h = step * (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::NonFinite { t });
                }
            }
        }
        on_sample(t, y)?;
    }
    Ok(stats)
}
