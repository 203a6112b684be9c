//! Memory indices <-> stable phase-locked configurations.
//!
//! Index `s` is written in base `b = 2*ceil(n_c/4) - 1` with the digit for
//! cycle 1 most significant; digit `d` on cycle `p` becomes the winding
//! `k_p = d - (ceil(n_c/4) - 1)`, realised as a constant step `2*pi*k_p/n_c`
//! along the cycle's chain.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    classify_equilibrium, integrate, IntegrateOptions, Verdict, TOL_EQ, TOL_ZERO,
};
use crate::error::{Error, Result};
use crate::graph::{Honeycomb, HoneycombSpec};
use crate::winding::{d_cc, winding_vector, WindingVector};

/// Default snapping tolerance (radians) for [`decode`].
pub const SNAP_TOL: f64 = 0.3;

/// Number of stable phase-cohesive configurations, `(2*ceil(n_c/4) - 1)^m`.
pub fn capacity(spec: HoneycombSpec) -> BigUint {
    BigUint::from(spec.base()).pow(spec.m() as u32)
}

/// Stored patterns per oscillator, `N_eq / n`.
pub fn capacity_ratio(spec: HoneycombSpec) -> f64 {
    let n = capacity(spec).to_f64().unwrap_or(f64::INFINITY);
    n / spec.node_count() as f64
}

/// `log10` of [`capacity_ratio`], finite even when the ratio overflows `f64`.
pub fn capacity_ratio_log10(spec: HoneycombSpec) -> f64 {
    spec.m() as f64 * f64::from(spec.base()).log10() - (spec.node_count() as f64).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLockedConfig {
    pub theta: Vec<f64>,
    pub k: WindingVector,
}

/// Base-`b` digits of `s`, cycle 1 first (most significant).
pub fn digits(spec: HoneycombSpec, s: &BigUint) -> Result<Vec<u32>> {
    let cap = capacity(spec);
    if s >= &cap {
        return Err(Error::IndexOutOfRange {
            index: s.to_string(),
            capacity: cap.to_string(),
        });
    }
    let mut raw = s.to_radix_le(spec.base());
    raw.resize(spec.m(), 0);
    Ok(raw.into_iter().rev().map(u32::from).collect())
}

pub fn windings_of_index(spec: HoneycombSpec, s: &BigUint) -> Result<WindingVector> {
    let shift = spec.max_winding();
    Ok(WindingVector(
        digits(spec, s)?
            .into_iter()
            .map(|d| d as i64 - shift)
            .collect(),
    ))
}

pub fn index_of_windings(spec: HoneycombSpec, k: &WindingVector) -> Result<BigUint> {
    check_windings(spec, k)?;
    let shift = spec.max_winding();
    let base = BigUint::from(spec.base());
    Ok(k.as_slice().iter().fold(BigUint::zero(), |acc, &kp| {
        acc * &base + BigUint::from((kp + shift) as u64)
    }))
}

fn check_windings(spec: HoneycombSpec, k: &WindingVector) -> Result<()> {
    if k.len() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            got: k.len(),
        });
    }
    let bound = spec.max_winding();
    if let Some((p, &kp)) = k
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, kp)| kp.abs() > bound)
    {
        return Err(Error::WindingOutOfRange {
            cycle: p + 1,
            k: kp,
            bound,
        });
    }
    Ok(())
}

/// Configuration with winding `k`, built outward from `theta_1 = 0`.
pub fn config_from_windings(spec: HoneycombSpec, k: &WindingVector) -> Result<PhaseLockedConfig> {
    check_windings(spec, k)?;
    let n_c = spec.n_c();
    let mut theta = vec![0.0; spec.node_count()];
    for (p, &kp) in k.as_slice().iter().enumerate() {
        let step = TAU * kp as f64 / n_c as f64;
        let start = spec.cycle_start(p);
        for i in start + 1..start + n_c {
            theta[i] = theta[i - 1] + step;
        }
    }
    Ok(PhaseLockedConfig {
        theta,
        k: k.clone(),
    })
}

pub fn encode(spec: HoneycombSpec, s: &BigUint) -> Result<PhaseLockedConfig> {
    config_from_windings(spec, &windings_of_index(spec, s)?)
}

/// Winding vector read from the first edge of each cycle, after checking
/// that every in-cycle difference (closing edge included) is within
/// `snap_tol` of the snapped step.
pub fn decode_windings(spec: HoneycombSpec, theta: &[f64], snap_tol: f64) -> Result<WindingVector> {
    if theta.len() != spec.node_count() {
        return Err(Error::DimensionMismatch {
            expected: spec.node_count(),
            got: theta.len(),
        });
    }
    let n_c = spec.n_c();
    let unit = TAU / n_c as f64;
    let bound = spec.max_winding();
    let mut k = Vec::with_capacity(spec.m());
    for p in 0..spec.m() {
        let start = spec.cycle_start(p);
        let first = d_cc(theta[start + 1], theta[start]);
        let kp = (first / unit).round();
        let step = kp * unit;
        for j in 0..n_c {
            let a = start + j;
            let b = if j + 1 == n_c { start } else { a + 1 };
            let residual = d_cc(theta[b] - theta[a], step).abs();
            if residual >= snap_tol {
                return Err(Error::SnapResidual {
                    cycle: p + 1,
                    residual,
                    tol: snap_tol,
                });
            }
        }
        let kp = kp as i64;
        if kp.abs() > bound {
            return Err(Error::WindingOutOfRange {
                cycle: p + 1,
                k: kp,
                bound,
            });
        }
        k.push(kp);
    }
    Ok(WindingVector(k))
}

pub fn decode(spec: HoneycombSpec, theta: &[f64], snap_tol: f64) -> Result<BigUint> {
    index_of_windings(spec, &decode_windings(spec, theta, snap_tol)?)
}

/// Parse a memory index written in decimal, or in binary (most significant
/// bit first) when prefixed with `0b`.
pub fn parse_index(text: &str) -> Result<BigUint> {
    let text = text.trim();
    let (digits, radix) = match text.strip_prefix("0b") {
        Some(bits) => (bits, 2),
        None => (text, 10),
    };
    BigUint::parse_bytes(digits.as_bytes(), radix)
        .ok_or_else(|| Error::InvalidParameter(format!("not a memory index: {text:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumClass {
    pub k: WindingVector,
    pub verdict: Verdict,
    pub count: usize,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub restarts: usize,
    pub seed: u64,
    /// Distinct (winding vector, verdict) pairs reached, in sorted order.
    pub classes: Vec<EquilibriumClass>,
    /// Runs that did not reach an equilibrium within the time limit.
    pub non_converged: usize,
}

impl EnumerationReport {
    /// Winding vectors of all Stable limits.
    pub fn stable_windings(&self) -> Vec<&WindingVector> {
        self.classes
            .iter()
            .filter(|c| c.verdict == Verdict::Stable)
            .map(|c| &c.k)
            .collect()
    }

    /// Stable limits whose winding vector lies outside the admissible range.
    pub fn stable_outside(&self) -> Vec<&EquilibriumClass> {
        self.classes
            .iter()
            .filter(|c| c.verdict == Verdict::Stable && !c.admissible)
            .collect()
    }
}

/// Gradient flow from `restarts` uniformly random states; each limit is
/// classified and labelled by its winding vector.
pub fn enumerate_stable(hc: &Honeycomb, restarts: usize, seed: u64) -> Result<EnumerationReport> {
    let opts = IntegrateOptions {
        dt: 0.1,
        t_max: 5000.0,
        stop_tol: 1e-10,
        coupling: 1.0,
        monitor_energy: true,
    };
    let bound = hc.spec.max_winding();
    let mut counts: BTreeMap<(WindingVector, u8), (Verdict, usize)> = BTreeMap::new();
    let mut non_converged = 0;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let theta0: Vec<f64> = (0..hc.node_count())
            .map(|_| rng.gen_range(0.0..TAU))
            .collect();
        let traj = integrate(&hc.graph, &theta0, &opts)?;
        if !traj.converged() {
            non_converged += 1;
            continue;
        }
        let report = classify_equilibrium(&hc.graph, &traj.state.theta, TOL_EQ, TOL_ZERO)?;
        let k = winding_vector(&hc.cycles, &traj.state.theta)?;
        let key = (k, report.verdict as u8);
        counts.entry(key).or_insert((report.verdict, 0)).1 += 1;
    }
    let classes = counts
        .into_iter()
        .map(|((k, _), (verdict, count))| EquilibriumClass {
            admissible: k.within(bound),
            k,
            verdict,
            count,
        })
        .collect();
    Ok(EnumerationReport {
        restarts,
        seed,
        classes,
        non_converged,
    })
}
