use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, IntegratorConfig, Rhs};
use super::lindblad::{check_closed, decay_operator, JumpOperator};
use super::schrodinger::{check_resolution, Diagnostics};
use crate::error::{Error, Result};
use crate::linalg::{Csr, C64, I};
use crate::model::Hamiltonian;
use crate::observables::{measure_all, Probe, StateRef, TimeSeries};
use crate::qspace::{same_catalog, StateVector};

/// Trajectories per parallel work unit. Fixed so that results do not depend
/// on the thread count.
pub const CHUNK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McwfConfig {
    pub n_traj: usize,
    pub seed: u64,
}

/// Trajectory average: every probe column `x` comes with its standard error `x_se`.
#[derive(Clone, Debug)]
pub struct McwfOutcome {
    pub series: TimeSeries,
    pub diagnostics: Diagnostics,
    pub jump_counts: Vec<usize>,
}

struct JumpRhs<'a> {
    h: &'a Hamiltonian,
    jumps: &'a [JumpOperator],
    decay: &'a Csr,
    rng: ChaCha8Rng,
    threshold: f64,
    jumps_done: usize,
    scratch: Vec<C64>,
}

impl Rhs for JumpRhs<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    /// `dpsi = -i (H - (i/2) sum L^dagger L) psi`.
    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        dy.fill(C64::new(0.0, 0.0));
        self.h.apply_acc(t, -I, y, dy);
        if self.decay.nnz() > 0 {
            self.decay.mul_vec_acc(C64::new(-0.5, 0.0), y, dy);
        }
    }

    /// Jumps once the squared norm falls below the drawn threshold.
    fn after_step(&mut self, _t: f64, y: &mut [C64]) -> Result<()> {
        let p: f64 = y.iter().map(|a| a.norm_sqr()).sum();
        if p >= self.threshold {
            return Ok(());
        }
        let mut weights = Vec::with_capacity(self.jumps.len());
        for l in self.jumps {
            self.scratch.fill(C64::new(0.0, 0.0));
            l.matrix.mul_vec_acc(C64::new(1.0, 0.0), y, &mut self.scratch);
            weights.push(self.scratch.iter().map(|a| a.norm_sqr()).sum::<f64>());
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Ok(());
        }
        let mut pick = self.rng.random::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            if pick < *w {
                chosen = k;
                break;
            }
            pick -= w;
        }
        self.scratch.fill(C64::new(0.0, 0.0));
        self.jumps[chosen].matrix.mul_vec_acc(C64::new(1.0, 0.0), y, &mut self.scratch);
        let norm = weights[chosen].sqrt();
        for (a, b) in y.iter_mut().zip(&self.scratch) {
            *a = b / norm;
        }
        self.jumps_done += 1;
        self.threshold = self.rng.random::<f64>();
        Ok(())
    }
}

/// Random stream of trajectory `index`: the seed fixes the key, the index the stream.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Trajectory {
    samples: Vec<f64>,
    jumps: usize,
}

fn run_trajectory(
    h: &Hamiltonian,
    jumps: &[JumpOperator],
    decay: &Csr,
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    probes: &[Probe],
    rng: ChaCha8Rng,
) -> Result<Trajectory> {
    let mut rhs = JumpRhs {
        h,
        jumps,
        decay,
        rng,
        threshold: 0.0,
        jumps_done: 0,
        scratch: vec![C64::new(0.0, 0.0); h.dim()],
    };
    rhs.threshold = rhs.rng.random::<f64>();
    let basis = h.basis().clone();
    let mut samples = Vec::new();
    let mut y: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    integrate(&mut rhs, &mut y, cfg, |t, y| {
        let mut psi = StateVector::new(basis.clone(), DVector::from_column_slice(y))?;
        psi.normalize()?;
        samples.extend(measure_all(probes, t, StateRef::Pure(&psi))?);
        Ok(())
    })?;
    Ok(Trajectory {
        samples,
        jumps: rhs.jumps_done,
    })
}

/// Quantum-jump unraveling of the master equation.
///
/// Each trajectory follows `H - (i/2) sum L^dagger L` and jumps when its squared
/// norm falls below a uniform threshold; probes see the normalized state.
/// Trajectory `k` draws from [`trajectory_rng`]`(seed, k)`, and partial sums
/// are merged in trajectory order, so the output is bit-identical for a given
/// seed. Without any nonzero jump operator the evolution is deterministic and
/// a single trajectory stands for all of them.
pub fn mcwf_trajectories(
    h: &Hamiltonian,
    jumps: &[JumpOperator],
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    probes: &[Probe],
    mc: McwfConfig,
) -> Result<McwfOutcome> {
    if mc.n_traj == 0 {
        return Err(Error::InvalidArgument("at least one trajectory is needed".into()));
    }
    if !same_catalog(h.basis(), psi0.basis()) {
        return Err(Error::BasisMismatch("initial state and Hamiltonian use different bases".into()));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("initial state has norm {}", psi0.norm())));
    }
    let leakage = check_closed(h, jumps)?;
    check_resolution(h, cfg)?;
    let decay = decay_operator(h.dim(), jumps);
    let stochastic = jumps.iter().any(|j| !j.is_null());
    let times = cfg.sample_times();
    let width = probes.len();

    let (sum, sumsq, jump_counts) = if stochastic {
        let chunks: Vec<Result<(Vec<f64>, Vec<f64>, Vec<usize>)>> = (0..mc.n_traj.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut s = vec![0.0; times.len() * width];
                let mut q = vec![0.0; times.len() * width];
                let mut counts = Vec::new();
                for k in c * CHUNK..((c + 1) * CHUNK).min(mc.n_traj) {
                    let tr = run_trajectory(h, jumps, &decay, psi0, cfg, probes, trajectory_rng(mc.seed, k))?;
                    for (i, v) in tr.samples.iter().enumerate() {
                        s[i] += v;
                        q[i] += v * v;
                    }
                    counts.push(tr.jumps);
                }
                Ok((s, q, counts))
            })
            .collect();
        let mut sum = vec![0.0; times.len() * width];
        let mut sumsq = vec![0.0; times.len() * width];
        let mut counts = Vec::with_capacity(mc.n_traj);
        for chunk in chunks {
            let (s, q, c) = chunk?;
            for i in 0..sum.len() {
                sum[i] += s[i];
                sumsq[i] += q[i];
            }
            counts.extend(c);
        }
        (sum, sumsq, counts)
    } else {
        let tr = run_trajectory(h, jumps, &decay, psi0, cfg, probes, trajectory_rng(mc.seed, 0))?;
        let n = mc.n_traj as f64;
        let sum: Vec<f64> = tr.samples.iter().map(|v| v * n).collect();
        let sumsq: Vec<f64> = tr.samples.iter().map(|v| v * v * n).collect();
        (sum, sumsq, vec![0; mc.n_traj])
    };

    let n = mc.n_traj as f64;
    let mut names = Vec::with_capacity(2 * width);
    for p in probes {
        names.push(p.name().to_string());
        names.push(format!("{}_se", p.name()));
    }
    let mut series = TimeSeries::over_time(names);
    for (i, &t) in times.iter().enumerate() {
        let mut row = Vec::with_capacity(2 * width);
        for c in 0..width {
            let mean = sum[i * width + c] / n;
            let var = if stochastic && mc.n_traj > 1 {
                ((sumsq[i * width + c] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            row.push(mean);
            row.push((var / n).sqrt());
        }
        series.push(t, &row)?;
    }
    series.set_meta("n_traj", mc.n_traj);
    series.set_meta("seed", mc.seed);
    let mean_jumps = jump_counts.iter().sum::<usize>() as f64 / n;
    Ok(McwfOutcome {
        series,
        diagnostics: Diagnostics {
            steps: Default::default(),
            leakage,
            mean_jumps: Some(mean_jumps),
            ..Diagnostics::default()
        },
        jump_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PulsePair;
    use crate::qspace::{BasisCatalog, BasisLabel, LevelScheme, StateLabel};
    use std::sync::Arc;

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
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| trajectory_rng(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trajectory_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let mut r1 = trajectory_rng(7, 1);
        let mut r2 = trajectory_rng(7, 2);
        assert_ne!(r1.random::<u64>(), r2.random::<u64>());
    }

    #[test]
    fn fock_decay_within_three_standard_errors() {
        let b = fock(1);
        let kappa = 0.5;
        let h = Hamiltonian::zero(b.clone(), PulsePair::new(1.0, 1.0, 0.0).unwrap());
        let l = JumpOperator::cavity_decay(kappa, &b).unwrap();
        let one = StateVector::from_label(b.clone(), &StateLabel::Product(BasisLabel::new(vec![0], 1))).unwrap();
        let cfg = IntegratorConfig::rk4(0.0, 4.0, 0.005).with_sample_every(100);
        let mc = McwfConfig { n_traj: 2000, seed: 11 };
        let out = mcwf_trajectories(&h, &[l], &one, &cfg, &[Probe::PhotonMean], mc).unwrap();
        let mean = out.series.column("photon_mean").unwrap();
        let se = out.series.column("photon_mean_se").unwrap();
        for ((t, m), s) in out.series.index.iter().zip(mean).zip(se) {
            let exact = (-kappa * t).exp();
            assert!((m - exact).abs() <= 3.0 * s + 1e-12, "t={t}: {m} vs {exact} (se {s})");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let b = fock(2);
        let h = Hamiltonian::zero(b.clone(), PulsePair::new(1.0, 1.0, 0.0).unwrap());
        let l = JumpOperator::cavity_decay(0.4, &b).unwrap();
        let two = StateVector::from_label(b.clone(), &StateLabel::Product(BasisLabel::new(vec![0], 2))).unwrap();
        let cfg = IntegratorConfig::rk4(0.0, 2.0, 0.01).with_sample_every(20);
        let mc = McwfConfig { n_traj: 50, seed: 3 };
        let a = mcwf_trajectories(&h, std::slice::from_ref(&l), &two, &cfg, &[Probe::PhotonMean], mc).unwrap();
        let b2 = mcwf_trajectories(&h, &[l], &two, &cfg, &[Probe::PhotonMean], mc).unwrap();
        assert_eq!(a.series.to_csv().unwrap(), b2.series.to_csv().unwrap());
        assert_eq!(a.jump_counts, b2.jump_counts);
    }
}
