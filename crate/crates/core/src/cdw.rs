//! Resistively coupled 1T-TaS2 relaxation oscillators.
//!
//! Each device output relaxes exponentially toward `V_ch` while charging and
//! toward `V_dis` while discharging; the device switches to discharging when
//! its voltage rises through `v_th_high` (a peak) and back to charging when it
//! falls through `v_th_low`. Neighbours exchange current
//! `(v_i - v_j) / R_couple`.
//!
//! Phases are peak-based: an oscillator is at phase 0 at a peak and advances
//! uniformly through `2*pi` over one free-running period.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CycleBasis, Graph};
use crate::winding::d_cc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdwParams {
    /// High-resistance state, ohms.
    pub r_h: f64,
    /// Low-resistance state, ohms.
    pub r_l: f64,
    /// Parasitic capacitance, farads.
    pub c: f64,
    /// Series load, ohms.
    pub r_s: f64,
    /// Bias, volts.
    pub v_dc: f64,
    /// Coupling resistor, ohms; `f64::INFINITY` decouples.
    pub r_couple: f64,
    pub v_th_low: f64,
    pub v_th_high: f64,
}

/// Half-width of the default hysteresis window as a fraction of `V_ch - V_dis`.
pub const DEFAULT_HALF_WINDOW: f64 = 0.005;

impl CdwParams {
    /// Circuit values of the two-pentagon demonstration with thresholds at
    /// the given fractions of the `[V_dis, V_ch]` range.
    pub fn with_threshold_fractions(low: f64, high: f64) -> Self {
        let mut p = Self {
            r_h: 2.5e3,
            r_l: 500.0,
            c: 10e-12,
            r_s: 1e3,
            v_dc: 3.0,
            r_couple: 3.5e3,
            v_th_low: 0.0,
            v_th_high: 0.0,
        };
        let (lo, span) = (p.v_dis(), p.v_ch() - p.v_dis());
        p.v_th_low = lo + low * span;
        p.v_th_high = lo + high * span;
        p
    }

    pub fn r_ch(&self) -> f64 {
        self.r_h * self.r_s / (self.r_h + self.r_s)
    }

    pub fn v_ch(&self) -> f64 {
        self.r_h / (self.r_h + self.r_s) * self.v_dc
    }

    pub fn r_dis(&self) -> f64 {
        self.r_l * self.r_s / (self.r_l + self.r_s)
    }

    pub fn v_dis(&self) -> f64 {
        self.r_l / (self.r_l + self.r_s) * self.v_dc
    }

    pub fn tau_ch(&self) -> f64 {
        self.r_ch() * self.c
    }

    pub fn tau_dis(&self) -> f64 {
        self.r_dis() * self.c
    }

    /// Voltage at which the charging and discharging slopes have equal
    /// magnitude, `(R_dis V_ch + R_ch V_dis) / (R_ch + R_dis)`.
    pub fn balanced_voltage(&self) -> f64 {
        (self.r_dis() * self.v_ch() + self.r_ch() * self.v_dis()) / (self.r_ch() + self.r_dis())
    }

    /// Coupling rate `1 / (R_couple C)`.
    pub fn coupling_rate(&self) -> f64 {
        1.0 / (self.r_couple * self.c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.r_h,
            self.r_l,
            self.c,
            self.r_s,
            self.v_dc,
            self.r_couple,
        ];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidParameter(
                "circuit values must be positive".into(),
            ));
        }
        if !(self.r_h > self.r_l) {
            return Err(Error::InvalidParameter("need R_H > R_L".into()));
        }
        if !(self.v_dis() < self.v_th_low
            && self.v_th_low < self.v_th_high
            && self.v_th_high < self.v_ch())
        {
            return Err(Error::InvalidParameter(format!(
                "thresholds must satisfy V_dis = {:.4} < v_th_low = {} < v_th_high = {} < V_ch = {:.4}",
                self.v_dis(),
                self.v_th_low,
                self.v_th_high,
                self.v_ch()
            )));
        }
        Ok(())
    }

    /// Time to charge from `v_th_low` to `v_th_high`.
    pub fn charge_time(&self) -> f64 {
        self.tau_ch() * ((self.v_ch() - self.v_th_low) / (self.v_ch() - self.v_th_high)).ln()
    }

    /// Time to discharge from `v_th_high` to `v_th_low`.
    pub fn discharge_time(&self) -> f64 {
        self.tau_dis() * ((self.v_th_high - self.v_dis()) / (self.v_th_low - self.v_dis())).ln()
    }

    pub fn free_period(&self) -> f64 {
        self.charge_time() + self.discharge_time()
    }

    /// Free-running voltage and mode at `phase` (0 = peak).
    pub fn limit_cycle_point(&self, phase: f64) -> (f64, Mode) {
        let t = phase.rem_euclid(TAU) / TAU * self.free_period();
        let t_dis = self.discharge_time();
        if t < t_dis {
            let v = self.v_dis() + (self.v_th_high - self.v_dis()) * (-t / self.tau_dis()).exp();
            (v, Mode::Discharging)
        } else {
            let v =
                self.v_ch() - (self.v_ch() - self.v_th_low) * (-(t - t_dis) / self.tau_ch()).exp();
            (v, Mode::Charging)
        }
    }

    /// Closed-form phase response to a small voltage kick: `2*pi / (T v')`
    /// while charging, where the kick brings the next peak forward, and
    /// `-2*pi / (T |v'|)` while discharging, where it delays the next reset.
    pub fn analytic_prc(&self, phase: f64) -> f64 {
        let (v, mode) = self.limit_cycle_point(phase);
        let scale = TAU / self.free_period();
        match mode {
            Mode::Charging => scale * self.tau_ch() / (self.v_ch() - v),
            Mode::Discharging => -scale * self.tau_dis() / (v - self.v_dis()),
        }
    }
}

impl Default for CdwParams {
    /// Demonstration circuit with a narrow hysteresis window centred on
    /// [`CdwParams::balanced_voltage`].
    fn default() -> Self {
        let probe = Self::with_threshold_fractions(0.25, 0.75);
        let span = probe.v_ch() - probe.v_dis();
        let mid = (probe.balanced_voltage() - probe.v_dis()) / span;
        Self::with_threshold_fractions(mid - DEFAULT_HALF_WINDOW, mid + DEFAULT_HALF_WINDOW)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Charging,
    Discharging,
}

impl Mode {
    /// CSV code: 1 charging, 0 discharging.
    pub fn code(self) -> u8 {
        match self {
            Mode::Charging => 1,
            Mode::Discharging => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdwNetworkState {
    pub v: Vec<f64>,
    pub mode: Vec<Mode>,
    pub t: f64,
}

impl CdwNetworkState {
    /// Each oscillator placed on the free-running limit cycle at its phase.
    pub fn from_phases(params: &CdwParams, phases: &[f64]) -> Self {
        let (v, mode) = phases.iter().map(|&p| params.limit_cycle_point(p)).unzip();
        Self { v, mode, t: 0.0 }
    }
}

/// A threshold crossing located inside a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub oscillator: usize,
    pub t: f64,
    /// Mode entered at the switch; `Discharging` marks a peak.
    pub mode: Mode,
}

fn derivative(params: &CdwParams, g: &Graph, v: &[f64], mode: &[Mode], out: &mut [f64]) {
    let (v_ch, v_dis) = (params.v_ch(), params.v_dis());
    let (tau_ch, tau_dis) = (params.tau_ch(), params.tau_dis());
    for i in 0..v.len() {
        out[i] = match mode[i] {
            Mode::Charging => (v_ch - v[i]) / tau_ch,
            Mode::Discharging => (v_dis - v[i]) / tau_dis,
        };
    }
    let k = params.coupling_rate();
    if k > 0.0 {
        for &(i, j) in g.edges() {
            let flow = k * (v[i] - v[j]);
            out[i] -= flow;
            out[j] += flow;
        }
    }
}

/// RK4 integrator with modes frozen inside each sub-step and switches
/// located by linear interpolation of the threshold crossing, after which
/// the step is re-integrated up to the crossing time.
#[derive(Debug, Clone)]
pub struct CdwSimulator<'g> {
    params: CdwParams,
    graph: &'g Graph,
    state: CdwNetworkState,
    dt: f64,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    next: Vec<f64>,
}

impl<'g> CdwSimulator<'g> {
    pub fn new(
        params: CdwParams,
        graph: &'g Graph,
        state: CdwNetworkState,
        dt: f64,
    ) -> Result<Self> {
        params.validate()?;
        let n = graph.node_count();
        if state.v.len() != n || state.mode.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.v.len().min(state.mode.len()),
            });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} must be positive"
            )));
        }
        Ok(Self {
            params,
            graph,
            state,
            dt,
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
            next: vec![0.0; n],
        })
    }

    pub fn state(&self) -> &CdwNetworkState {
        &self.state
    }

    pub fn params(&self) -> &CdwParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Add `dv` to oscillator `i`, switching at once if that carries it
    /// across its active threshold.
    pub fn kick(&mut self, i: usize, dv: f64) -> Option<SwitchEvent> {
        self.state.v[i] += dv;
        let crossed = self.crossed(i, self.state.v[i]);
        crossed.then(|| self.flip(i))
    }

    fn crossed(&self, i: usize, v: f64) -> bool {
        match self.state.mode[i] {
            Mode::Charging => v >= self.params.v_th_high,
            Mode::Discharging => v <= self.params.v_th_low,
        }
    }

    fn threshold(&self, i: usize) -> f64 {
        match self.state.mode[i] {
            Mode::Charging => self.params.v_th_high,
            Mode::Discharging => self.params.v_th_low,
        }
    }

    fn flip(&mut self, i: usize) -> SwitchEvent {
        let mode = match self.state.mode[i] {
            Mode::Charging => Mode::Discharging,
            Mode::Discharging => Mode::Charging,
        };
        self.state.mode[i] = mode;
        SwitchEvent {
            oscillator: i,
            t: self.state.t,
            mode,
        }
    }

    fn rk4_into_next(&mut self, h: f64) {
        let n = self.state.v.len();
        let (p, g) = (&self.params, self.graph);
        let v = &self.state.v;
        let mode = &self.state.mode;
        let [k1, k2, k3, k4] = &mut self.k;
        derivative(p, g, v, mode, k1);
        for i in 0..n {
            self.tmp[i] = v[i] + 0.5 * h * k1[i];
        }
        derivative(p, g, &self.tmp, mode, k2);
        for i in 0..n {
            self.tmp[i] = v[i] + 0.5 * h * k2[i];
        }
        derivative(p, g, &self.tmp, mode, k3);
        for i in 0..n {
            self.tmp[i] = v[i] + h * k3[i];
        }
        derivative(p, g, &self.tmp, mode, k4);
        for i in 0..n {
            self.next[i] = v[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Advance by one step of length `dt`, returning the switches in order.
    pub fn step(&mut self) -> Result<Vec<SwitchEvent>> {
        let mut events = Vec::new();
        let mut remaining = self.dt;
        let n = self.state.v.len();
        // Each pass either finishes the step or performs at least one switch;
        // more switches than this in a single step means dt is far too large.
        for _ in 0..=4 * n + 4 {
            if remaining <= 0.0 {
                return Ok(events);
            }
            self.rk4_into_next(remaining);
            if self.next.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { t: self.state.t });
            }
            // Earliest crossing as (fraction of the remaining step, oscillator).
            let mut first: Option<(f64, usize)> = None;
            for i in 0..n {
                if self.crossed(i, self.next[i]) {
                    let (a, b) = (self.state.v[i], self.next[i]);
                    let frac = if b == a {
                        0.0
                    } else {
                        ((self.threshold(i) - a) / (b - a)).clamp(0.0, 1.0)
                    };
                    if first.map_or(true, |(f, _)| frac < f) {
                        first = Some((frac, i));
                    }
                }
            }
            let Some((frac, earliest)) = first else {
                std::mem::swap(&mut self.state.v, &mut self.next);
                self.state.t += remaining;
                return Ok(events);
            };
            let h = remaining * frac;
            if h > 0.0 {
                self.rk4_into_next(h);
                std::mem::swap(&mut self.state.v, &mut self.next);
                self.state.t += h;
            }
            remaining -= h;
            // Interpolation may leave the earliest oscillator a hair short of
            // its threshold; it switches regardless, as does anyone else who
            // has reached theirs.
            let tol = 1e-9 * (self.params.v_th_high - self.params.v_th_low);
            for i in 0..n {
                let gap = self.threshold(i) - self.state.v[i];
                let gap = match self.state.mode[i] {
                    Mode::Charging => gap,
                    Mode::Discharging => -gap,
                };
                if i == earliest || gap <= tol {
                    events.push(self.flip(i));
                }
            }
        }
        Err(Error::InvalidParameter(format!(
            "too many switches within one step of {} s",
            self.dt
        )))
    }
}

/// One step of the coupled circuit from `state`.
pub fn cdw_step(
    params: &CdwParams,
    graph: &Graph,
    state: &CdwNetworkState,
    dt: f64,
) -> Result<CdwNetworkState> {
    let mut sim = CdwSimulator::new(*params, graph, state.clone(), dt)?;
    sim.step()?;
    Ok(sim.state.clone())
}

/// Default step: `T_free / 2000`.
pub fn default_dt(params: &CdwParams) -> f64 {
    params.free_period() / 2000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageTrace {
    pub t: Vec<f64>,
    /// `v[k]` holds all oscillator voltages at `t[k]`.
    pub v: Vec<Vec<f64>>,
    pub mode: Vec<Vec<Mode>>,
    /// Peak (upward `v_th_high` crossing) times per oscillator over the whole run.
    pub peaks: Vec<Vec<f64>>,
    pub t_end: f64,
}

impl VoltageTrace {
    pub fn to_csv(&self) -> String {
        let n = self.peaks.len();
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",v_{i}");
        }
        for i in 1..=n {
            let _ = write!(out, ",mode_{i}");
        }
        out.push('\n');
        for ((t, v), mode) in self.t.iter().zip(&self.v).zip(&self.mode) {
            let _ = write!(out, "{t:e}");
            for x in v {
                let _ = write!(out, ",{x}");
            }
            for m in mode {
                let _ = write!(out, ",{}", m.code());
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Voltages are sampled from this time on.
    pub record_from: f64,
    /// Steps between samples.
    pub stride: usize,
}

pub fn simulate(
    params: &CdwParams,
    graph: &Graph,
    initial: CdwNetworkState,
    opts: &RunOptions,
) -> Result<VoltageTrace> {
    let n = graph.node_count();
    let mut sim = CdwSimulator::new(*params, graph, initial, opts.dt)?;
    let steps = (opts.t_end / opts.dt).ceil() as u64;
    let stride = opts.stride.max(1) as u64;
    let mut trace = VoltageTrace {
        t: Vec::new(),
        v: Vec::new(),
        mode: Vec::new(),
        peaks: vec![Vec::new(); n],
        t_end: 0.0,
    };
    for step in 0..=steps {
        let s = sim.state();
        if s.t >= opts.record_from && step % stride == 0 {
            trace.t.push(s.t);
            trace.v.push(s.v.clone());
            trace.mode.push(s.mode.clone());
        }
        if step == steps {
            break;
        }
        for e in sim.step()? {
            if e.mode == Mode::Discharging {
                trace.peaks[e.oscillator].push(e.t);
            }
        }
    }
    trace.t_end = sim.state().t;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrace {
    /// Post-settle peak times per oscillator.
    pub peak_times: Vec<Vec<f64>>,
    /// Mean of the last intervals between peaks, per oscillator.
    pub period: Vec<f64>,
    /// Phase at `t_ref`, `2*pi (t_ref - last peak) / period`.
    pub phases: Vec<f64>,
    pub t_ref: f64,
}

/// Minimum post-settle peaks per oscillator.
pub const MIN_PEAKS: usize = 10;
/// Intervals averaged for the steady-state period.
const PERIOD_WINDOW: usize = 10;

pub fn extract_phases(trace: &VoltageTrace, settle_fraction: f64) -> Result<PhaseTrace> {
    if !(0.0..1.0).contains(&settle_fraction) {
        return Err(Error::InvalidParameter(format!(
            "settle fraction {settle_fraction} must lie in [0, 1)"
        )));
    }
    let t_ref = trace.t_end;
    let t_settle = settle_fraction * t_ref;
    let mut peak_times = Vec::with_capacity(trace.peaks.len());
    let mut period = Vec::with_capacity(trace.peaks.len());
    let mut phases = Vec::with_capacity(trace.peaks.len());
    for (i, all) in trace.peaks.iter().enumerate() {
        let kept: Vec<f64> = all.iter().copied().filter(|&t| t >= t_settle).collect();
        if kept.len() < MIN_PEAKS {
            return Err(Error::TooFewPeaks {
                oscillator: i + 1,
                found: kept.len(),
                needed: MIN_PEAKS,
            });
        }
        let w = PERIOD_WINDOW.min(kept.len() - 1);
        let last = kept[kept.len() - 1];
        let p = (last - kept[kept.len() - 1 - w]) / w as f64;
        phases.push(TAU * (t_ref - last) / p);
        period.push(p);
        peak_times.push(kept);
    }
    Ok(PhaseTrace {
        peak_times,
        period,
        phases,
        t_ref,
    })
}

impl PhaseTrace {
    /// `(max - min) / mean` of the periods.
    pub fn period_spread(&self) -> f64 {
        let max = self
            .period
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self.period.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = self.period.iter().sum::<f64>() / self.period.len() as f64;
        (max - min) / mean
    }

    /// `d_cc(phase_b, phase_a)`.
    pub fn difference(&self, a: usize, b: usize) -> f64 {
        d_cc(self.phases[b], self.phases[a])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePhase {
    pub cycle: usize,
    /// 1-based.
    pub from: usize,
    /// 1-based.
    pub to: usize,
    pub d_cc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub edges: Vec<EdgePhase>,
    pub periods: Vec<f64>,
    pub period_spread: f64,
}

/// Steady-state differences along every directed cycle edge.
pub fn phase_report(phases: &PhaseTrace, cycles: &CycleBasis) -> PhaseReport {
    let edges = (0..cycles.len())
        .flat_map(|p| {
            cycles.directed_edges(p).map(move |(a, b)| EdgePhase {
                cycle: p + 1,
                from: a + 1,
                to: b + 1,
                d_cc: phases.difference(a, b),
            })
        })
        .collect();
    PhaseReport {
        edges,
        periods: phases.period.clone(),
        period_spread: phases.period_spread(),
    }
}

/// Perturbations (in units of pi) added to the two-pentagon targets.
pub const CYCLE1_PERTURBATION: [f64; 5] = [0.064, -0.049, 0.065, -0.002, 0.082];
pub const CYCLE2_PERTURBATION: [f64; 4] = [0.082, 0.085, 0.044, -0.088];

/// Initial phases of the two-pentagon demonstration: cycle 1 near steps of
/// `+2*pi/5`, cycle 2 near steps of `-2*pi/5`. The shared node keeps its
/// cycle-1 value; the four cycle-2 perturbations go to nodes 6 to 9.
pub fn demo_initial_phases() -> Vec<f64> {
    let mut theta = vec![0.0; 9];
    for (i, d) in CYCLE1_PERTURBATION.iter().enumerate() {
        theta[i] = TAU * i as f64 / 5.0 + d * PI;
    }
    for (j, d) in CYCLE2_PERTURBATION.iter().enumerate() {
        theta[5 + j] = TAU * (3 - j as i32) as f64 / 5.0 + d * PI;
    }
    theta
}

/// Phase shifts of a single free-running device kicked by `impulse` volts at
/// `samples` equally spaced phases, divided by the impulse.
pub fn phase_response_curve(params: &CdwParams, impulse: f64, samples: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let max = 0.01 * (params.v_th_high - params.v_th_low);
    if impulse.abs() > max {
        return Err(Error::ImpulseTooLarge { impulse, max });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if impulse == 0.0 {
        return Ok(vec![0.0; samples]);
    }
    let g = Graph::from_edges(1, &[])?;
    let period = params.free_period();
    let dt = default_dt(params);
    const SETTLE_PERIODS: f64 = 20.0;
    (0..samples)
        .map(|k| {
            let psi = TAU * k as f64 / samples as f64;
            let start = CdwNetworkState::from_phases(params, &[psi]);
            let mut sim = CdwSimulator::new(*params, &g, start, dt)?;
            let mut last_peak = None;
            if let Some(e) = sim.kick(0, impulse) {
                last_peak = Some(e.t);
            }
            let steps = (SETTLE_PERIODS * period / dt).ceil() as u64;
            for _ in 0..steps {
                for e in sim.step()? {
                    if e.mode == Mode::Discharging {
                        last_peak = Some(e.t);
                    }
                }
            }
            let t_peak = last_peak.expect("device oscillates");
            // Unperturbed peaks fall at (2*pi - psi)/(2*pi) * T + j T.
            let first = (TAU - psi) / TAU * period;
            let j = ((t_peak - first) / period).round();
            let shift = TAU * (first + j * period - t_peak) / period;
            Ok(d_cc(shift, 0.0) / impulse)
        })
        .collect()
}

/// Free-running voltage sampled at `samples` equally spaced phases.
pub fn limit_cycle_samples(params: &CdwParams, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| params.limit_cycle_point(TAU * k as f64 / samples as f64).0)
        .collect()
}

/// `Gamma(phi) = (1/2pi) int Z(phi + psi) (V(phi + psi) - V(psi)) dpsi` on the
/// shared uniform grid (periodic trapezoid rule).
pub fn interaction_function(z: &[f64], v_cycle: &[f64]) -> Result<Vec<f64>> {
    if z.len() != v_cycle.len() {
        return Err(Error::GridMismatch(z.len(), v_cycle.len()));
    }
    let n = z.len();
    Ok((0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let a = (j + k) % n;
                    z[a] * (v_cycle[a] - v_cycle[j])
                })
                .sum::<f64>()
                / n as f64
        })
        .collect())
}

/// Coefficients `(a_h, b_h)` of `a_h sin(h phi) + b_h cos(h phi)` in a
/// uniformly sampled periodic function.
pub fn fourier_coefficients(f: &[f64], h: usize) -> (f64, f64) {
    let n = f.len() as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for (k, y) in f.iter().enumerate() {
        let x = TAU * (h * k) as f64 / n;
        a += y * x.sin();
        b += y * x.cos();
    }
    (2.0 * a / n, 2.0 * b / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineFit {
    /// Least-squares amplitude `A` of `A sin(phi)`.
    pub amplitude: f64,
    /// `|Gamma - A sin|_2 / |Gamma|_2`.
    pub relative_residual: f64,
    /// First-harmonic sine over cosine coefficient magnitude.
    pub sine_dominance: f64,
}

pub fn sine_fit(gamma: &[f64]) -> SineFit {
    let (a1, b1) = fourier_coefficients(gamma, 1);
    let n = gamma.len() as f64;
    let (mut res, mut norm) = (0.0, 0.0);
    for (k, y) in gamma.iter().enumerate() {
        let fit = a1 * (TAU * k as f64 / n).sin();
        res += (y - fit).powi(2);
        norm += y * y;
    }
    SineFit {
        amplitude: a1,
        relative_residual: if norm > 0.0 { (res / norm).sqrt() } else { 0.0 },
        sine_dominance: a1.abs() / b1.abs(),
    }
}
