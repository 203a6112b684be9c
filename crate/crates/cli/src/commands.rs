use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use honeycomb_kuramoto::basin::{self, TrialOptions};
use honeycomb_kuramoto::cdw::{self, CdwNetworkState, CdwParams, RunOptions};
use honeycomb_kuramoto::codec::{self, SNAP_TOL};
use honeycomb_kuramoto::dynamics::{self, IntegrateOptions, TrajectoryCsv};
use honeycomb_kuramoto::localbasin;
use honeycomb_kuramoto::{winding_vector, BigUint, Honeycomb, HoneycombSpec};

use crate::settings::Settings;
use crate::Common;

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn spec_from(
    settings: &mut Settings,
    m: Option<usize>,
    nc: Option<usize>,
    dm: usize,
    dnc: usize,
) -> Result<HoneycombSpec> {
    let m = settings.get("m", m, dm)?;
    let nc = settings.get("nc", nc, dnc)?;
    Ok(HoneycombSpec::new(m, nc)?)
}

fn format_ratio(spec: HoneycombSpec) -> String {
    let c = codec::capacity_ratio(spec);
    if c < 1e15 {
        return format!("{c}");
    }
    let l = codec::capacity_ratio_log10(spec);
    let exp = l.floor();
    format!("{:.6}e{exp}", 10f64.powf(l - exp))
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
}

pub fn capacity(common: &Common, a: CapacityArgs) -> Result<()> {
    let mut s = Settings::load(common.config.as_deref())?;
    let spec = spec_from(&mut s, a.m, a.nc, 1, 5)?;
    s.finish()?;
    let line = format!(
        "N_eq={} n={} C={}\n",
        codec::capacity(spec),
        spec.node_count(),
        format_ratio(spec)
    );
    emit(common, &line)
}

/// Phase file: 1-based `index theta` lines, `#` comments.
pub fn format_phase_file(header: &str, theta: &[f64]) -> String {
    let mut out = header.to_string();
    for (i, t) in theta.iter().enumerate() {
        let _ = writeln!(out, "{} {t:.17e}", i + 1);
    }
    out
}

/// Phases plus any `# key=value` settings found in comments.
pub fn parse_phase_file(text: &str) -> Result<(Vec<f64>, Vec<(String, String)>)> {
    let mut meta = Vec::new();
    let mut entries = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                if !k.contains(char::is_whitespace) {
                    meta.push((k.to_string(), v.trim().to_string()));
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(i), Some(t), None) = (it.next(), it.next(), it.next()) else {
            bail!("phase file line {}: expected `index theta`", no + 1);
        };
        let i: usize = i
            .parse()
            .map_err(|_| anyhow!("phase file line {}: bad index {i:?}", no + 1))?;
        let t: f64 = t
            .parse()
            .map_err(|_| anyhow!("phase file line {}: bad phase {t:?}", no + 1))?;
        entries.push((i, t));
    }
    let n = entries.len();
    let mut theta = vec![f64::NAN; n];
    for (i, t) in entries {
        if i == 0 || i > n || !theta[i - 1].is_nan() {
            bail!("phase file indices must be 1..={n}, each exactly once (offending index {i})");
        }
        theta[i - 1] = t;
    }
    Ok((theta, meta))
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    /// Decimal index, or binary with a `0b` prefix.
    #[arg(long)]
    s: Option<String>,
}

pub fn encode(common: &Common, a: EncodeArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let spec = spec_from(&mut st, a.m, a.nc, 2, 5)?;
    let raw = st.get("s", a.s, "0".to_string())?;
    st.finish()?;
    let s = codec::parse_index(&raw)?;
    let config = codec::encode(spec, &s)?;
    let header = format!("{}# k={}\n", st.header("encode"), config.k);
    emit(common, &format_phase_file(&header, &config.theta))
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    input: PathBuf,
    /// Defaults to the value recorded in the phase file header.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    #[arg(long)]
    snap_tol: Option<f64>,
    /// Also print the index in binary.
    #[arg(long)]
    binary: bool,
}

pub fn decode(common: &Common, a: DecodeArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let (theta, meta) = parse_phase_file(&text)?;
    let from_header = |key: &str| -> Result<Option<usize>> {
        meta.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| {
                v.parse()
                    .map_err(|_| anyhow!("bad `{key}` in phase file header"))
            })
            .transpose()
    };
    let mut st = Settings::load(common.config.as_deref())?;
    let m = st
        .get_opt("m", a.m)?
        .or(from_header("m")?)
        .ok_or_else(|| anyhow!("number of cycles unknown; pass --m"))?;
    let nc = st
        .get_opt("nc", a.nc)?
        .or(from_header("nc")?)
        .ok_or_else(|| anyhow!("cycle length unknown; pass --nc"))?;
    let snap_tol = st.get("snap_tol", a.snap_tol, SNAP_TOL)?;
    st.finish()?;
    let spec = HoneycombSpec::new(m, nc)?;
    let k = codec::decode_windings(spec, &theta, snap_tol)?;
    let s = codec::index_of_windings(spec, &k)?;
    let mut line = format!("s={s} k={k}");
    if a.binary {
        let _ = write!(line, " binary=0b{}", s.to_str_radix(2));
    }
    line.push('\n');
    emit(common, &line)
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated cycle lengths.
    #[arg(long)]
    nc: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated magnitudes as fractions of each guaranteed radius.
    #[arg(long)]
    fractions: Option<String>,
    /// Comma-separated absolute magnitudes in radians; replaces `fractions`.
    #[arg(long)]
    magnitudes: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    capture_tol: Option<f64>,
}

pub const DEFAULT_FRACTIONS: [f64; 8] = [0.25, 0.5, 0.75, 0.95, 1.1, 1.3, 1.6, 2.0];

pub fn basin_sweep(common: &Common, a: SweepArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let m = st.get("m", a.m, 10usize)?;
    let ncs = st.get_list("nc", a.nc, vec![5usize, 6, 7, 8])?;
    let trials = st.get("trials", a.trials, 500usize)?;
    let seed = st.get("seed", a.seed, 1u64)?;
    let absolute = st.get_list::<f64>("magnitudes", a.magnitudes, vec![])?;
    let fractions = if absolute.is_empty() {
        st.get_list("fractions", a.fractions, DEFAULT_FRACTIONS.to_vec())?
    } else {
        vec![]
    };
    let defaults = TrialOptions::default();
    let opts = TrialOptions {
        dt: st.get("dt", a.dt, defaults.dt)?,
        t_max: st.get("t_max", a.t_max, defaults.t_max)?,
        capture_tol: st.get("capture_tol", a.capture_tol, defaults.capture_tol)?,
        ..defaults
    };
    st.finish()?;

    let mut csv = st.header("basin-sweep");
    csv.push_str("n_c,m,magnitude,success_rate,trials,seed\n");
    let mut violations = Vec::new();
    for nc in ncs {
        let spec = HoneycombSpec::new(m, nc)?;
        let radius = basin::theoretical_radius(nc)?.radius;
        let mags: Vec<f64> = if absolute.is_empty() {
            fractions.iter().map(|f| f * radius).collect()
        } else {
            absolute.clone()
        };
        let report = basin::basin_sweep(spec, &mags, trials, seed, &opts)?;
        csv.push_str(&report.to_csv(false));
        for ((mag, rate), nonconv) in report
            .magnitudes
            .iter()
            .zip(&report.success_rate)
            .zip(&report.non_converged)
        {
            if *nonconv > 0 {
                eprintln!("n_c={nc} magnitude={mag}: {nonconv} trials hit t_max");
            }
            if *mag < radius && *rate < 1.0 {
                violations.push(format!("n_c={nc} magnitude={mag} success_rate={rate}"));
            }
        }
    }
    emit(common, &csv)?;
    if !violations.is_empty() {
        bail!(
            "failures inside the guaranteed radius: {}",
            violations.join("; ")
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn enumerate_stable(common: &Common, a: EnumerateArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let spec = spec_from(&mut st, a.m, a.nc, 2, 5)?;
    let restarts = st.get("restarts", a.restarts, 2000usize)?;
    let seed = st.get("seed", a.seed, 1u64)?;
    st.finish()?;
    let hc = honeycomb_kuramoto::build_honeycomb(spec);
    let report = codec::enumerate_stable(&hc, restarts, seed)?;
    let mut out = st.header("enumerate-stable");
    for c in &report.classes {
        let _ = writeln!(
            out,
            "k={} verdict={:?} count={} admissible={}",
            c.k, c.verdict, c.count, c.admissible
        );
    }
    let outside = report.stable_outside();
    let _ = writeln!(out, "stable_classes={}", report.stable_windings().len());
    let _ = writeln!(out, "non_converged={}", report.non_converged);
    let _ = writeln!(out, "stable_outside={}", outside.len());
    emit(common, &out)?;
    if !outside.is_empty() {
        bail!("stable equilibria outside the admissible winding range were found");
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    /// Samples for the V-dot inequality.
    #[arg(long)]
    samples: Option<usize>,
    /// Integrated runs for the convergence check.
    #[arg(long)]
    conv_samples: Option<usize>,
    /// Starting deviation as a fraction of the certified radius.
    #[arg(long)]
    radius_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn lyapunov(common: &Common, a: LyapunovArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let samples = st.get("samples", a.samples, 10_000usize)?;
    let conv_samples = st.get("conv_samples", a.conv_samples, 200usize)?;
    let fraction = st.get("radius_fraction", a.radius_fraction, 0.99)?;
    let seed = st.get("seed", a.seed, 1u64)?;
    st.finish()?;

    let cert = localbasin::splay_certificate()?;
    let vdot = localbasin::vdot_check(samples, seed)?;
    let conv = localbasin::convergence_check(conv_samples, seed, fraction * cert.r2)?;
    let mu_ok = cert.max_abs_error < 1e-9;
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": st.to_json(),
        "mu": cert.mu,
        "beta": cert.beta,
        "r2": cert.r2,
        "mu_closed_form": cert.mu_closed_form,
        "max_abs_error": cert.max_abs_error,
        "remainder_coeff": cert.remainder_coeff,
        "vdot": {
            "samples": vdot.samples,
            "violations": vdot.violations.len(),
            "worst_ratio": vdot.worst_ratio,
        },
        "convergence": {
            "samples": conv.samples,
            "radius": conv.radius,
            "retrieved": conv.retrieved,
            "non_converged": conv.non_converged,
            "monotone_violations": conv.monotone_violations,
            "max_increase": conv.max_increase,
        },
        "passed": mu_ok && vdot.passed() && conv.passed(),
    });
    emit(
        common,
        &format!("{}\n", serde_json::to_string_pretty(&doc)?),
    )?;
    if !mu_ok {
        bail!(
            "spectral gap differs from (sqrt(5)-2)/2 by {}",
            cert.max_abs_error
        );
    }
    if !vdot.passed() {
        bail!(
            "{} samples violate the V-dot inequality",
            vdot.violations.len()
        );
    }
    if !conv.passed() {
        bail!(
            "convergence check failed: retrieved {}/{}, {} non-monotone",
            conv.retrieved,
            conv.samples,
            conv.monotone_violations
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CdwArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    #[arg(long)]
    r_h: Option<f64>,
    #[arg(long)]
    r_l: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    r_s: Option<f64>,
    #[arg(long)]
    v_dc: Option<f64>,
    /// Coupling resistor in ohms; `inf` decouples.
    #[arg(long)]
    r_couple: Option<f64>,
    #[arg(long)]
    v_th_low: Option<f64>,
    #[arg(long)]
    v_th_high: Option<f64>,
    /// `demo` (perturbed two-pentagon targets) or `sync`.
    #[arg(long)]
    init: Option<String>,
    /// Step in seconds; defaults to the free period / 2000.
    #[arg(long)]
    dt: Option<f64>,
    /// Run length in free periods.
    #[arg(long)]
    periods: Option<f64>,
    #[arg(long)]
    settle_fraction: Option<f64>,
    /// Free periods at the end of the run written to the trace.
    #[arg(long)]
    record_periods: Option<f64>,
    /// Steps between trace samples.
    #[arg(long)]
    stride: Option<usize>,
    /// Voltage trace CSV path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

/// Required accuracy of the demo's steady-state phase steps, radians.
pub const CDW_PHASE_TOL: f64 = 0.05;
/// Allowed relative spread of steady-state periods.
pub const CDW_PERIOD_SPREAD: f64 = 0.005;

pub fn cdw(common: &Common, a: CdwArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let spec = spec_from(&mut st, a.m, a.nc, 2, 5)?;
    let d = CdwParams::default();
    let params = CdwParams {
        r_h: st.get("r_h", a.r_h, d.r_h)?,
        r_l: st.get("r_l", a.r_l, d.r_l)?,
        c: st.get("c", a.c, d.c)?,
        r_s: st.get("r_s", a.r_s, d.r_s)?,
        v_dc: st.get("v_dc", a.v_dc, d.v_dc)?,
        r_couple: st.get("r_couple", a.r_couple, d.r_couple)?,
        v_th_low: st.get("v_th_low", a.v_th_low, d.v_th_low)?,
        v_th_high: st.get("v_th_high", a.v_th_high, d.v_th_high)?,
    };
    params.validate()?;
    let init = st.get("init", a.init, "demo".to_string())?;
    let dt = st.get("dt", a.dt, cdw::default_dt(&params))?;
    let periods = st.get("periods", a.periods, 12_000.0)?;
    let settle = st.get("settle_fraction", a.settle_fraction, 0.9)?;
    let record_periods = st.get("record_periods", a.record_periods, 5.0)?;
    let stride = st.get("stride", a.stride, 10usize)?;
    let trace_path = st.get_opt("trace", a.trace.map(|p| p.display().to_string()))?;
    st.finish()?;

    let hc = honeycomb_kuramoto::build_honeycomb(spec);
    let phases = match init.as_str() {
        "demo" => {
            if (spec.m(), spec.n_c()) != (2, 5) {
                bail!("init=demo needs m=2, nc=5");
            }
            cdw::demo_initial_phases()
        }
        "sync" => vec![0.0; hc.node_count()],
        other => bail!("invalid value {other:?} for config key `init` (expected demo or sync)"),
    };
    let t_free = params.free_period();
    let t_end = periods * t_free;
    let run = RunOptions {
        dt,
        t_end,
        record_from: (t_end - record_periods * t_free).max(0.0),
        stride,
    };
    let trace = cdw::simulate(
        &params,
        &hc.graph,
        CdwNetworkState::from_phases(&params, &phases),
        &run,
    )?;
    let phase = cdw::extract_phases(&trace, settle)?;
    let report = cdw::phase_report(&phase, &hc.cycles);

    let uncoupled = params.r_couple.is_infinite();
    let period_error = phase
        .period
        .iter()
        .map(|p| (p / t_free - 1.0).abs())
        .fold(0.0, f64::max);
    let mut failures = Vec::new();
    if uncoupled {
        if period_error > 1e-3 {
            failures.push(format!("free-running period off by {period_error:.2e}"));
        }
    } else if report.period_spread >= CDW_PERIOD_SPREAD {
        failures.push(format!("period spread {:.2e}", report.period_spread));
    }
    let mut target = serde_json::Value::Null;
    if init == "demo" && !uncoupled {
        let step = TAU / 5.0;
        let max_error = report
            .edges
            .iter()
            .map(|e| {
                let want = if e.cycle == 1 { step } else { -step };
                (e.d_cc - want).abs()
            })
            .fold(0.0, f64::max);
        if max_error > CDW_PHASE_TOL {
            failures.push(format!("phase steps off target by {max_error:.3} rad"));
        }
        target = json!({ "cycle_steps": [step, -step], "max_error": max_error, "tolerance": CDW_PHASE_TOL });
    }
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": st.to_json(),
        "free_period": t_free,
        "max_period_error": period_error,
        "period_spread": report.period_spread,
        "periods": report.periods,
        "edges": report.edges,
        "target": target,
        "passed": failures.is_empty(),
    });
    if let Some(path) = trace_path {
        let mut text = st.header("cdw");
        text.push_str(&trace.to_csv());
        write_file(Path::new(&path), &text)?;
    }
    emit(
        common,
        &format!("{}\n", serde_json::to_string_pretty(&doc)?),
    )?;
    if !failures.is_empty() {
        bail!("{}", failures.join("; "));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    /// Start from this phase file instead of an encoded memory.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Memory index to start from.
    #[arg(long)]
    s: Option<String>,
    /// Uniform per-node noise amplitude added to the start, radians.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    stop_tol: Option<f64>,
    /// Steps between CSV rows.
    #[arg(long)]
    stride: Option<usize>,
}

pub fn simulate(common: &Common, a: SimulateArgs) -> Result<()> {
    let mut st = Settings::load(common.config.as_deref())?;
    let spec = spec_from(&mut st, a.m, a.nc, 2, 5)?;
    let input = st.get_opt("input", a.input.map(|p| p.display().to_string()))?;
    let s = st.get("s", a.s, "0".to_string())?;
    let noise = st.get("noise", a.noise, 0.0)?;
    let seed = st.get("seed", a.seed, 1u64)?;
    let d = IntegrateOptions::default();
    let opts = IntegrateOptions {
        dt: st.get("dt", a.dt, d.dt)?,
        t_max: st.get("t_max", a.t_max, d.t_max)?,
        stop_tol: st.get("stop_tol", a.stop_tol, d.stop_tol)?,
        ..d
    };
    let stride = st.get("stride", a.stride, 100usize)?;
    st.finish()?;

    let hc = Honeycomb::new(spec.m(), spec.n_c())?;
    let mut theta = match &input {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            parse_phase_file(&text)?.0
        }
        None => codec::encode(spec, &codec::parse_index(&s)?)?.theta,
    };
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        theta
            .iter_mut()
            .for_each(|x| *x += rng.gen_range(-noise..=noise));
    }
    let mut csv = TrajectoryCsv::new(hc.node_count(), stride);
    let traj = dynamics::integrate_observed(&hc.graph, &theta, &opts, |t, th, _| {
        csv.observe(t, th);
        ControlFlow::Continue(())
    })?;
    if traj.steps as usize % stride != 0 {
        csv.push_row(traj.state.t, &traj.state.theta);
    }
    let mut text = st.header("simulate");
    text.push_str(&csv.finish());
    emit(common, &text)?;
    let windings = winding_vector(&hc.cycles, &traj.state.theta)
        .map(|k| k.to_string())
        .unwrap_or_else(|e| e.to_string());
    let decoded = codec::decode(spec, &traj.state.theta, SNAP_TOL)
        .map(|s: BigUint| s.to_string())
        .unwrap_or_else(|e| e.to_string());
    eprintln!(
        "converged={} t={} residual={:e} windings={windings} decoded={decoded}",
        traj.converged(),
        traj.state.t,
        traj.residual
    );
    Ok(())
}
