//! Guaranteed basin radius and Monte-Carlo retrieval experiments.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{self, config_from_windings, decode_windings};
use crate::dynamics::{integrate_observed, rotational_distance, IntegrateOptions, StopReason};
use crate::error::{Error, Result};
use crate::graph::{Honeycomb, HoneycombSpec, MIN_CYCLE_LEN};
use crate::winding::WindingVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinBound {
    pub n_c: usize,
    /// `((n_c - 1) mod 4) + 1`.
    pub r: usize,
    /// `pi * r / (2 n_c)` radians.
    pub radius: f64,
}

pub fn theoretical_radius(n_c: usize) -> Result<BasinBound> {
    if n_c < MIN_CYCLE_LEN {
        return Err(Error::InvalidSpec { m: 1, n_c });
    }
    let r = (n_c - 1) % 4 + 1;
    Ok(BasinBound {
        n_c,
        r,
        radius: PI * r as f64 / (2 * n_c) as f64,
    })
}

/// `pi/2 - (ceil(n_c/4) - 1) * 2*pi/n_c`: the margin left to the cohesive
/// limit by the largest admissible step.
pub fn cohesive_margin(n_c: usize) -> f64 {
    FRAC_PI_2 - (n_c.div_ceil(4) - 1) as f64 * TAU / n_c as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOptions {
    pub dt: f64,
    pub t_max: f64,
    pub stop_tol: f64,
    /// A run is captured once it lies within this distance (infinity norm,
    /// modulo rotation) of the stable configuration it currently decodes to.
    pub capture_tol: f64,
    pub snap_tol: f64,
    /// Steps between capture checks.
    pub check_every: usize,
    pub monitor_energy: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            dt: 0.1,
            t_max: 5000.0,
            stop_tol: 1e-10,
            capture_tol: 0.01,
            snap_tol: codec::SNAP_TOL,
            check_every: 10,
            monitor_energy: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    /// False when `t_max` elapsed without capture or convergence.
    pub converged: bool,
}

/// Perturb the configuration with winding `k` by i.i.d. uniform noise on
/// `[-magnitude, magnitude]`, relax, and compare the decoded limit with `k`.
pub fn retrieval_trial_windings<R: Rng>(
    hc: &Honeycomb,
    k: &WindingVector,
    magnitude: f64,
    rng: &mut R,
    opts: &TrialOptions,
) -> Result<TrialOutcome> {
    if !(magnitude >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "magnitude {magnitude} must be >= 0"
        )));
    }
    let spec = hc.spec;
    let target = config_from_windings(spec, k)?;
    let theta0: Vec<f64> = target
        .theta
        .iter()
        .map(|x| {
            if magnitude > 0.0 {
                x + rng.gen_range(-magnitude..=magnitude)
            } else {
                *x
            }
        })
        .collect();

    let int_opts = IntegrateOptions {
        dt: opts.dt,
        t_max: opts.t_max,
        stop_tol: opts.stop_tol,
        coupling: 1.0,
        monitor_energy: opts.monitor_energy,
    };
    let every = opts.check_every.max(1);
    let mut calls = 0usize;
    let traj = integrate_observed(&hc.graph, &theta0, &int_opts, |_, theta, _| {
        calls += 1;
        if (calls - 1) % every != 0 {
            return ControlFlow::Continue(());
        }
        match decode_windings(spec, theta, opts.snap_tol) {
            Ok(found) => {
                let stable =
                    config_from_windings(spec, &found).expect("decoded windings are admissible");
                if rotational_distance(theta, &stable.theta) < opts.capture_tol {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            }
            Err(_) => ControlFlow::Continue(()),
        }
    })?;

    let converged = traj.reason != StopReason::TimeLimit;
    let success = converged
        && decode_windings(spec, &traj.state.theta, opts.snap_tol).is_ok_and(|found| &found == k);
    Ok(TrialOutcome { success, converged })
}

/// Seeded single trial for memory index `s`.
pub fn retrieval_trial(
    hc: &Honeycomb,
    s: &BigUint,
    magnitude: f64,
    seed: u64,
    opts: &TrialOptions,
) -> Result<TrialOutcome> {
    let k = codec::windings_of_index(hc.spec, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    retrieval_trial_windings(hc, &k, magnitude, &mut rng, opts)
}

/// Uniformly random admissible winding vector; equivalent to a uniform
/// memory index but usable when `N_eq` is astronomically large.
pub fn random_windings<R: Rng>(spec: HoneycombSpec, rng: &mut R) -> WindingVector {
    let b = spec.max_winding();
    WindingVector((0..spec.m()).map(|_| rng.gen_range(-b..=b)).collect())
}

/// Independent stream for trial `trial` at magnitude index `point`.
pub fn trial_rng(seed: u64, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinExperimentReport {
    pub n_c: usize,
    pub m: usize,
    pub magnitudes: Vec<f64>,
    pub success_rate: Vec<f64>,
    /// Trials per magnitude that hit `t_max` (counted as failures).
    pub non_converged: Vec<usize>,
    pub trials_per_point: usize,
    pub seed: u64,
}

impl BasinExperimentReport {
    pub fn to_csv(&self, with_header: bool) -> String {
        let mut out = String::new();
        if with_header {
            out.push_str("n_c,m,magnitude,success_rate,trials,seed\n");
        }
        for (mag, rate) in self.magnitudes.iter().zip(&self.success_rate) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.n_c, self.m, mag, rate, self.trials_per_point, self.seed
            );
        }
        out
    }

    /// Smallest tested magnitude with at least one failure.
    pub fn first_failure(&self) -> Option<f64> {
        self.magnitudes
            .iter()
            .zip(&self.success_rate)
            .find(|(_, &r)| r < 1.0)
            .map(|(&m, _)| m)
    }

    /// Magnitude where the success curve first drops through 1/2, by linear
    /// interpolation between grid points.
    pub fn half_success_radius(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .magnitudes
            .iter()
            .copied()
            .zip(self.success_rate.iter().copied())
            .collect();
        pts.windows(2).find_map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            (y0 >= 0.5 && y1 < 0.5).then(|| x0 + (y0 - 0.5) * (x1 - x0) / (y0 - y1))
        })
    }
}

pub fn basin_sweep(
    spec: HoneycombSpec,
    magnitudes: &[f64],
    trials: usize,
    seed: u64,
    opts: &TrialOptions,
) -> Result<BasinExperimentReport> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let hc = crate::graph::build_honeycomb(spec);
    let mut success_rate = Vec::with_capacity(magnitudes.len());
    let mut non_converged = Vec::with_capacity(magnitudes.len());
    for (point, &mag) in magnitudes.iter().enumerate() {
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, point, trial);
                let k = random_windings(spec, &mut rng);
                retrieval_trial_windings(&hc, &k, mag, &mut rng, opts)
            })
            .collect::<Result<Vec<_>>>()?;
        let ok = outcomes.iter().filter(|o| o.success).count();
        success_rate.push(ok as f64 / trials as f64);
        non_converged.push(outcomes.iter().filter(|o| !o.converged).count());
    }
    Ok(BasinExperimentReport {
        n_c: spec.n_c(),
        m: spec.m(),
        magnitudes: magnitudes.to_vec(),
        success_rate,
        non_converged,
        trials_per_point: trials,
        seed,
    })
}
