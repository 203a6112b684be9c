//! Identical-frequency Kuramoto gradient flow
//! `dtheta_i/dt = K * sum_{j ~ i} sin(theta_j - theta_i)`,
//! its potential `U = -sum_{(i,j) in E} cos(theta_i - theta_j)`, and
//! equilibrium classification through the Hessian spectrum.
//!
//! Phases are kept unwrapped on the real line; wrapping only happens in
//! [`crate::winding::d_cc`].

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Honeycomb};
use crate::linalg::{self, norm_inf, symmetric_eigen, Matrix};
use crate::winding::d_cc;

/// Default equilibrium residual tolerance for classification.
pub const TOL_EQ: f64 = 1e-8;
/// Default threshold below which an eigenvalue counts as zero.
pub const TOL_ZERO: f64 = 1e-7;

/// Phases at a simulation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub theta: Vec<f64>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t: 0.0 });
        }
        Ok(Self { theta, t: 0.0 })
    }
}

fn check_dim(g: &Graph, len: usize) -> Result<()> {
    if g.node_count() != len {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            got: len,
        });
    }
    Ok(())
}

fn rhs_into(g: &Graph, theta: &[f64], coupling: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for &(i, j) in g.edges() {
        let s = coupling * (theta[j] - theta[i]).sin();
        out[i] += s;
        out[j] -= s;
    }
}

/// Vector field of the flow.
pub fn rhs(g: &Graph, theta: &[f64], coupling: f64) -> Result<Vec<f64>> {
    check_dim(g, theta.len())?;
    let mut out = vec![0.0; theta.len()];
    rhs_into(g, theta, coupling, &mut out);
    Ok(out)
}

/// `max_i |rhs_i|` with unit coupling.
pub fn residual(g: &Graph, theta: &[f64]) -> Result<f64> {
    Ok(norm_inf(&rhs(g, theta, 1.0)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient {
    pub energy: f64,
    pub grad: Vec<f64>,
}

fn potential(g: &Graph, theta: &[f64]) -> f64 {
    -g.edges()
        .iter()
        .map(|&(i, j)| (theta[i] - theta[j]).cos())
        .sum::<f64>()
}

/// Potential energy and its gradient (`grad = -rhs` at unit coupling).
pub fn energy(g: &Graph, theta: &[f64]) -> Result<EnergyGradient> {
    let mut grad = rhs(g, theta, 1.0)?;
    grad.iter_mut().for_each(|x| *x = -*x);
    Ok(EnergyGradient {
        energy: potential(g, theta),
        grad,
    })
}

/// Hessian of the potential: `h_ii = sum_k cos(theta_i - theta_k)`,
/// `h_ij = -cos(theta_i - theta_j)` on edges.
pub fn hessian(g: &Graph, theta: &[f64]) -> Result<Matrix> {
    check_dim(g, theta.len())?;
    let mut h = Matrix::zeros(theta.len(), theta.len());
    for &(i, j) in g.edges() {
        let c = (theta[i] - theta[j]).cos();
        h[(i, i)] += c;
        h[(j, j)] += c;
        h[(i, j)] -= c;
        h[(j, i)] -= c;
    }
    Ok(h)
}

/// `(1/6) sum_{(i,j) in E} sin(theta_i - theta_j) (v_j - v_i)^3`, the cubic
/// term of the energy expansion along `v`.
pub fn third_order_term(g: &Graph, theta: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(g, theta.len())?;
    check_dim(g, v.len())?;
    Ok(g.edges()
        .iter()
        .map(|&(i, j)| (theta[i] - theta[j]).sin() * (v[j] - v[i]).powi(3))
        .sum::<f64>()
        / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t_max: f64,
    /// Converged once `max |rhs| < stop_tol`.
    pub stop_tol: f64,
    pub coupling: f64,
    /// Verify the energy is nonincreasing (within `ENERGY_SLACK`) at every step.
    pub monitor_energy: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_max: 5000.0,
            stop_tol: 1e-10,
            coupling: 1.0,
            monitor_energy: true,
        }
    }
}

pub const ENERGY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    TimeLimit,
    /// The observer asked to stop.
    Observer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: PhaseState,
    pub reason: StopReason,
    pub steps: u64,
    /// `max |rhs|` at the final state.
    pub residual: f64,
}

impl Trajectory {
    pub fn converged(&self) -> bool {
        self.reason == StopReason::Converged
    }
}

/// Fixed-step RK4 until the residual drops below `stop_tol` or `t_max`.
pub fn integrate(g: &Graph, theta0: &[f64], opts: &IntegrateOptions) -> Result<Trajectory> {
    integrate_observed(g, theta0, opts, |_, _, _| ControlFlow::Continue(()))
}

/// Like [`integrate`], calling `observer(t, theta, residual)` on the initial
/// state and after every accepted step. Returning `Break` ends the run with
/// [`StopReason::Observer`].
pub fn integrate_observed<F>(
    g: &Graph,
    theta0: &[f64],
    opts: &IntegrateOptions,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], f64) -> ControlFlow<()>,
{
    check_dim(g, theta0.len())?;
    if !(opts.dt > 0.0 && opts.t_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt = {} and t_max = {} must be positive",
            opts.dt, opts.t_max
        )));
    }
    let n = theta0.len();
    let dt = opts.dt;
    let k = opts.coupling;
    let mut theta = theta0.to_vec();
    let mut t = 0.0;
    let mut steps = 0u64;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut u_prev = potential(g, &theta);

    loop {
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        rhs_into(g, &theta, k, &mut k1);
        let res = norm_inf(&k1);
        let finish = |reason, theta: Vec<f64>| Trajectory {
            state: PhaseState { theta, t },
            reason,
            steps,
            residual: res,
        };
        if observer(t, &theta, res).is_break() {
            return Ok(finish(StopReason::Observer, theta));
        }
        if res < opts.stop_tol {
            return Ok(finish(StopReason::Converged, theta));
        }
        if t >= opts.t_max {
            return Ok(finish(StopReason::TimeLimit, theta));
        }

        for i in 0..n {
            tmp[i] = theta[i] + 0.5 * dt * k1[i];
        }
        rhs_into(g, &tmp, k, &mut k2);
        for i in 0..n {
            tmp[i] = theta[i] + 0.5 * dt * k2[i];
        }
        rhs_into(g, &tmp, k, &mut k3);
        for i in 0..n {
            tmp[i] = theta[i] + dt * k3[i];
        }
        rhs_into(g, &tmp, k, &mut k4);
        for i in 0..n {
            theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        steps += 1;
        t = steps as f64 * dt;

        if opts.monitor_energy {
            let u = potential(g, &theta);
            if u > u_prev + ENERGY_SLACK {
                return Err(Error::EnergyIncrease {
                    t,
                    increase: u - u_prev,
                });
            }
            u_prev = u;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Hessian spectrum, ascending.
    pub eigenvalues: Vec<f64>,
    pub zero_count: usize,
    /// Smallest Hessian eigenvalue on the complement of the all-ones direction.
    pub lambda2: f64,
    pub verdict: Verdict,
    /// Cubic energy term along a ramp perturbation, filled for degenerate
    /// honeycomb equilibria by [`classify_honeycomb`].
    pub third_order: Option<f64>,
}

/// Eigen-analysis of the Hessian at an equilibrium.
pub fn classify_equilibrium(
    g: &Graph,
    theta: &[f64],
    tol_eq: f64,
    tol_zero: f64,
) -> Result<StabilityReport> {
    let res = residual(g, theta)?;
    if res >= tol_eq {
        return Err(Error::NotAnEquilibrium {
            residual: res,
            tol: tol_eq,
        });
    }
    let h = hessian(g, theta)?;
    let eig = symmetric_eigen(&h)?;
    let zero_count = eig.values.iter().filter(|l| l.abs() < tol_zero).count();

    // H 1 = 0 identically, so lifting the all-ones direction above the
    // Gershgorin bound leaves exactly the complement's spectrum at the bottom.
    let n = theta.len();
    let bound = (0..n)
        .map(|i| h.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let lift = 2.0 * bound + 1.0;
    let mut shifted = h.clone();
    for i in 0..n {
        for j in 0..n {
            shifted[(i, j)] += lift / n as f64;
        }
    }
    let lambda2 = symmetric_eigen(&shifted)?.values[0];

    let verdict = if eig.values[0] < -tol_zero {
        Verdict::Unstable
    } else if zero_count > 1 {
        Verdict::Degenerate
    } else {
        Verdict::Stable
    };
    Ok(StabilityReport {
        eigenvalues: eig.values,
        zero_count,
        lambda2,
        verdict,
        third_order: None,
    })
}

/// [`classify_equilibrium`] on a honeycomb; degenerate cases additionally
/// report the cubic energy term along a ramp across a critical edge.
pub fn classify_honeycomb(
    hc: &Honeycomb,
    theta: &[f64],
    tol_eq: f64,
    tol_zero: f64,
) -> Result<StabilityReport> {
    let mut report = classify_equilibrium(&hc.graph, theta, tol_eq, tol_zero)?;
    if report.verdict == Verdict::Degenerate {
        let critical = (0..hc.cycles.len())
            .flat_map(|p| hc.cycles.directed_edges(p))
            .map(|(a, b)| (a, b, d_cc(theta[a], theta[b])))
            .max_by(|x, y| x.2.abs().total_cmp(&y.2.abs()));
        if let Some((a, b, diff)) = critical {
            // Ramp up on the endpoint whose lead makes sin(theta_u - theta_w) positive.
            let (u, w) = if diff.sin() >= 0.0 { (a, b) } else { (b, a) };
            let v = ramp_perturbation(hc, u, w, 1e-2)?;
            report.third_order = Some(third_order_term(&hc.graph, theta, &v)?);
        }
    }
    Ok(report)
}

/// Perturbation with `v_w = 0`, `v_u = delta`, decreasing by
/// `delta/(n_c-1)` per edge along the path from `u` to `w` that avoids the
/// edge `(u, w)`. Nodes off the cycle take the value of the shared node
/// they hang from, so edges outside the cycle carry no difference.
pub fn ramp_perturbation(hc: &Honeycomb, u: usize, w: usize, delta: f64) -> Result<Vec<f64>> {
    let p = hc
        .cycles
        .cycle_of_edge(u, w)
        .ok_or(Error::EdgeNotOnCycle(u + 1, w + 1))?;
    let cycle = &hc.cycles.cycles()[p];
    let len = cycle.len();
    let iu = cycle.iter().position(|&x| x == u).expect("u on cycle");
    let step_back = cycle[(iu + 1) % len] == w;
    let mut v = vec![0.0; hc.node_count()];
    for k in 0..len {
        let idx = if step_back {
            (iu + len - k) % len
        } else {
            (iu + k) % len
        };
        v[cycle[idx]] = delta * (1.0 - k as f64 / (len - 1) as f64);
    }
    let first = cycle[0];
    let last = cycle[len - 1];
    for i in 0..first {
        v[i] = v[first];
    }
    for i in (last + 1)..v.len() {
        v[i] = v[last];
    }
    Ok(v)
}

/// Ramp perturbation across an edge with `|d_cc| > pi/2` and its Hessian
/// quadratic form, which is negative at such equilibria.
pub fn instability_witness(
    hc: &Honeycomb,
    theta: &[f64],
    edge: (usize, usize),
    delta: f64,
) -> Result<(Vec<f64>, f64)> {
    check_dim(&hc.graph, theta.len())?;
    let (u, w) = edge;
    if hc.cycles.cycle_of_edge(u, w).is_none() {
        return Err(Error::EdgeNotOnCycle(u + 1, w + 1));
    }
    let diff = d_cc(theta[u], theta[w]);
    if diff.abs() <= FRAC_PI_2 {
        return Err(Error::EdgeNotCritical(diff));
    }
    let res = residual(&hc.graph, theta)?;
    if res >= TOL_EQ {
        return Err(Error::NotAnEquilibrium {
            residual: res,
            tol: TOL_EQ,
        });
    }
    let v = ramp_perturbation(hc, u, w, delta)?;
    let quad = hessian(&hc.graph, theta)?.quadratic_form(&v);
    Ok((v, quad))
}

/// Edge-sum form of the Hessian quadratic form,
/// `sum_{(i,j) in E} cos(theta_i - theta_j) (v_i - v_j)^2`.
pub fn quadratic_form_edge_sum(g: &Graph, theta: &[f64], v: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|&(i, j)| (theta[i] - theta[j]).cos() * (v[i] - v[j]).powi(2))
        .sum()
}

/// Collects CSV rows `t,theta_1,...,theta_n` every `stride` observations.
#[derive(Debug, Clone)]
pub struct TrajectoryCsv {
    stride: usize,
    seen: usize,
    out: String,
}

impl TrajectoryCsv {
    pub fn new(n: usize, stride: usize) -> Self {
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",theta_{i}");
        }
        out.push('\n');
        Self {
            stride: stride.max(1),
            seen: 0,
            out,
        }
    }

    pub fn observe(&mut self, t: f64, theta: &[f64]) {
        if self.seen % self.stride == 0 {
            self.push_row(t, theta);
        }
        self.seen += 1;
    }

    /// Append a row unconditionally (e.g. the final state).
    pub fn push_row(&mut self, t: f64, theta: &[f64]) {
        let _ = write!(self.out, "{t}");
        for x in theta {
            let _ = write!(self.out, ",{x}");
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Infinity-norm distance between `theta` and `target` after removing the
/// best constant shift, with differences taken modulo 2*pi relative to node 0.
pub fn rotational_distance(theta: &[f64], target: &[f64]) -> f64 {
    let base = theta[0] - target[0];
    let (lo, hi) = theta
        .iter()
        .zip(target)
        .map(|(a, b)| d_cc(a - b, base))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
    0.5 * (hi - lo)
}

pub use linalg::{mean, project_mean_zero};
