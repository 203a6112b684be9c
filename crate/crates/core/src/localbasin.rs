//! Quadratic Lyapunov certificate for the splay equilibrium of the 9-node
//! two-pentagon network, where the phase steps are `+2*pi/5` on the first
//! pentagon and `-2*pi/5` on the second.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codec::{self, config_from_windings, PhaseLockedConfig};
use crate::dynamics::{hessian, integrate_observed, rhs, IntegrateOptions, StopReason};
use crate::error::{Error, Result};
use crate::graph::Honeycomb;
use crate::linalg::{dot, mean, norm2, project_mean_zero, symmetric_eigen, Matrix};
use crate::winding::WindingVector;

/// Adjacency of the two-pentagon network, node 5 (1-based) shared.
pub const SPLAY_ADJACENCY: [[u8; 9]; 9] = [
    [0, 1, 0, 0, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 1, 0, 0, 0, 0],
    [1, 0, 0, 1, 0, 1, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, 1, 0, 0, 1, 0],
];

/// Winding vector of the splay equilibrium.
pub const SPLAY_WINDINGS: [i64; 2] = [1, -1];

/// `(sqrt(5) - 2) / 2`.
pub fn mu_closed_form() -> f64 {
    (5f64.sqrt() - 2.0) / 2.0
}

/// The canonical 2-cycle pentagon honeycomb, checked entrywise against
/// [`SPLAY_ADJACENCY`] under the identity labelling.
pub fn splay_network() -> Result<Honeycomb> {
    let hc = Honeycomb::new(2, 5)?;
    let a = hc.graph.adjacency_matrix();
    for (i, row) in SPLAY_ADJACENCY.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if a[(i, j)] != f64::from(x) {
                return Err(Error::InvalidParameter(format!(
                    "honeycomb(2,5) adjacency differs from the reference at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(hc)
}

pub fn splay_state() -> Result<PhaseLockedConfig> {
    let hc = splay_network()?;
    config_from_windings(hc.spec, &WindingVector(SPLAY_WINDINGS.to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    /// Spectral gap of `-J` on the complement of the all-ones direction.
    pub mu: f64,
    /// `sqrt(mu / 12)`.
    pub beta: f64,
    /// `beta / sqrt(2)`, the certified Euclidean radius.
    pub r2: f64,
    /// Bound on `||R||_2` for edge differences up to `beta`, with cubic slack.
    pub remainder_coeff: f64,
    pub mu_closed_form: f64,
    pub max_abs_error: f64,
}

/// `6 beta^2 + 10 beta^3`. The quadratic part bounds the cosine terms
/// (`|cos x - 1| <= x^2/2`, degree <= 4, sqrt(9) = 3); the cubic part bounds
/// the sine terms via `|sin x - x| <= |x|^3/6`, `3 * 4/6 < 10`.
pub fn remainder_bound(beta: f64) -> f64 {
    6.0 * beta * beta + 10.0 * beta.powi(3)
}

pub fn splay_certificate() -> Result<LyapunovCertificate> {
    let hc = splay_network()?;
    let star = splay_state()?;
    let eig = symmetric_eigen(&hessian(&hc.graph, &star.theta)?)?;
    let mu = eig.values[1];
    let beta = (mu / 12.0).sqrt();
    let closed = mu_closed_form();
    Ok(LyapunovCertificate {
        mu,
        beta,
        r2: beta / 2f64.sqrt(),
        remainder_coeff: remainder_bound(beta),
        mu_closed_form: closed,
        max_abs_error: (mu - closed).abs(),
    })
}

/// Linearisation at the splay state, `J = -H`.
pub fn splay_jacobian() -> Result<Matrix> {
    let hc = splay_network()?;
    Ok(hessian(&hc.graph, &splay_state()?.theta)?.scaled(-1.0))
}

/// Evaluates the deviation dynamics around the splay state.
#[derive(Debug, Clone)]
pub struct SplayDeviation {
    hc: Honeycomb,
    star: Vec<f64>,
    jacobian: Matrix,
}

impl SplayDeviation {
    pub fn new() -> Result<Self> {
        let hc = splay_network()?;
        let star = splay_state()?.theta;
        let jacobian = hessian(&hc.graph, &star)?.scaled(-1.0);
        Ok(Self { hc, star, jacobian })
    }

    pub fn star(&self) -> &[f64] {
        &self.star
    }

    pub fn network(&self) -> &Honeycomb {
        &self.hc
    }

    fn check(&self, psi: &[f64]) -> Result<()> {
        if psi.len() != self.star.len() {
            return Err(Error::DimensionMismatch {
                expected: self.star.len(),
                got: psi.len(),
            });
        }
        let m = mean(psi) * psi.len() as f64;
        if m.abs() > 1e-10 {
            return Err(Error::NotMeanZero(m));
        }
        Ok(())
    }

    fn shifted(&self, psi: &[f64]) -> Vec<f64> {
        self.star.iter().zip(psi).map(|(a, b)| a + b).collect()
    }

    /// `psi_dot = rhs(theta* + psi)`.
    pub fn velocity(&self, psi: &[f64]) -> Result<Vec<f64>> {
        self.check(psi)?;
        rhs(&self.hc.graph, &self.shifted(psi), 1.0)
    }

    /// Exact remainder `rhs(theta* + psi) - J psi` and its Euclidean norm.
    pub fn remainder(&self, psi: &[f64]) -> Result<(Vec<f64>, f64)> {
        let v = self.velocity(psi)?;
        let jp = self.jacobian.mul_vec(psi);
        let r: Vec<f64> = v.iter().zip(&jp).map(|(a, b)| a - b).collect();
        let n = norm2(&r);
        Ok((r, n))
    }

    /// Derivative of `V = |psi|^2 / 2` along the flow.
    pub fn vdot(&self, psi: &[f64]) -> Result<f64> {
        Ok(dot(psi, &self.velocity(psi)?))
    }

    /// Largest edge difference `|psi_j - psi_i|`.
    pub fn max_edge_difference(&self, psi: &[f64]) -> f64 {
        self.hc
            .graph
            .edges()
            .iter()
            .map(|&(i, j)| (psi[j] - psi[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Mean-zero vector of Euclidean norm `radius` in a uniformly random direction.
pub fn random_deviation<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        project_mean_zero(&mut v);
        let len = norm2(&v);
        if len > 1e-12 {
            let s = radius / len;
            v.iter_mut().for_each(|x| *x *= s);
            // Rescaling reintroduces rounding in the mean; remove it again.
            project_mean_zero(&mut v);
            return v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdotReport {
    pub samples: usize,
    /// Samples violating `V_dot <= -(mu/2) |psi|^2 + 1e-12`.
    pub violations: Vec<Vec<f64>>,
    /// Largest observed `V_dot / |psi|^2`.
    pub worst_ratio: f64,
    pub mu: f64,
}

impl VdotReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Monte-Carlo check of `V_dot <= -(mu/2) |psi|^2` over the certified ball.
pub fn vdot_check(samples: usize, seed: u64) -> Result<VdotReport> {
    if samples < 1 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let cert = splay_certificate()?;
    let dev = SplayDeviation::new()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut worst_ratio = f64::NEG_INFINITY;
    for _ in 0..samples {
        let radius = rng.gen_range(0.0..cert.r2);
        let psi = random_deviation(&mut rng, 9, radius);
        let nn = dot(&psi, &psi);
        let vd = dev.vdot(&psi)?;
        if vd > -0.5 * cert.mu * nn + 1e-12 {
            violations.push(psi);
        }
        if nn > 0.0 {
            worst_ratio = worst_ratio.max(vd / nn);
        }
    }
    Ok(VdotReport {
        samples,
        violations,
        worst_ratio,
        mu: cert.mu,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub samples: usize,
    pub radius: f64,
    /// Runs whose limit decodes to the splay memory.
    pub retrieved: usize,
    pub non_converged: usize,
    /// Runs in which `|psi(t)|_2` grew by more than `MONOTONE_SLACK` between steps.
    pub monotone_violations: usize,
    pub max_increase: f64,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.retrieved == self.samples && self.non_converged == 0 && self.monotone_violations == 0
    }
}

pub const MONOTONE_SLACK: f64 = 1e-8;

/// Integrate from `theta* + psi0` with `|psi0|_2 = radius` and check the
/// limit and the decay of the mean-zero deviation norm.
pub fn convergence_check(samples: usize, seed: u64, radius: f64) -> Result<ConvergenceReport> {
    if samples < 1 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let dev = SplayDeviation::new()?;
    let spec = dev.network().spec;
    let target = codec::index_of_windings(spec, &WindingVector(SPLAY_WINDINGS.to_vec()))?;
    let opts = IntegrateOptions {
        dt: 0.05,
        t_max: 2000.0,
        stop_tol: 1e-10,
        coupling: 1.0,
        monitor_energy: true,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConvergenceReport {
        samples,
        radius,
        retrieved: 0,
        non_converged: 0,
        monotone_violations: 0,
        max_increase: 0.0,
    };
    for _ in 0..samples {
        let psi0 = random_deviation(&mut rng, 9, radius);
        let theta0: Vec<f64> = dev.star().iter().zip(&psi0).map(|(a, b)| a + b).collect();
        let mut prev = f64::INFINITY;
        let mut worst = 0.0f64;
        let traj = integrate_observed(&dev.network().graph, &theta0, &opts, |_, theta, _| {
            let mut psi: Vec<f64> = theta.iter().zip(dev.star()).map(|(a, b)| a - b).collect();
            project_mean_zero(&mut psi);
            let n = norm2(&psi);
            worst = worst.max(n - prev);
            prev = n;
            ControlFlow::Continue(())
        })?;
        report.max_increase = report.max_increase.max(worst);
        if worst > MONOTONE_SLACK {
            report.monotone_violations += 1;
        }
        if traj.reason == StopReason::TimeLimit {
            report.non_converged += 1;
        }
        if codec::decode(spec, &traj.state.theta, codec::SNAP_TOL).ok() == Some(target.clone()) {
            report.retrieved += 1;
        }
    }
    Ok(report)
}

/// Memory index of the splay state.
pub fn splay_index() -> Result<BigUint> {
    let hc = splay_network()?;
    codec::index_of_windings(hc.spec, &WindingVector(SPLAY_WINDINGS.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_values() {
        let c = splay_certificate().unwrap();
        assert!((c.mu - 0.1180339887).abs() < 1e-9);
        assert!(c.max_abs_error < 1e-9);
        assert!((c.beta - 0.0992).abs() < 5e-5);
        assert!((c.r2 - 0.0701).abs() < 5e-5);
        assert!((c.r2 - 0.070).abs() < 5e-4);
    }

    #[test]
    fn splay_index_is_six() {
        assert_eq!(splay_index().unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn zero_deviation() {
        let dev = SplayDeviation::new().unwrap();
        let (r, n) = dev.remainder(&[0.0; 9]).unwrap();
        assert!(n < 1e-14 && r.iter().all(|x| x.abs() < 1e-14));
        assert!(dev.vdot(&[0.0; 9]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn remainder_rejects_nonzero_mean() {
        let dev = SplayDeviation::new().unwrap();
        let mut psi = [0.0; 9];
        psi[0] = 1e-3;
        assert!(matches!(dev.remainder(&psi), Err(Error::NotMeanZero(_))));
    }

    #[test]
    fn random_deviation_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let v = random_deviation(&mut rng, 9, 0.07);
            assert!((norm2(&v) - 0.07).abs() < 1e-12);
            assert!(v.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn small_vdot_check() {
        assert!(vdot_check(500, 3).unwrap().passed());
    }
}
