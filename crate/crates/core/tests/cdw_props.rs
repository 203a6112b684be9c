use std::f64::consts::{FRAC_PI_2, TAU};

use honeycomb_kuramoto::cdw::{
    default_dt, extract_phases, interaction_function, limit_cycle_samples, phase_response_curve,
    simulate, sine_fit, CdwNetworkState, CdwParams, RunOptions,
};
use honeycomb_kuramoto::{d_cc, Graph};

fn run(
    params: &CdwParams,
    graph: &Graph,
    phases: &[f64],
    periods: f64,
) -> honeycomb_kuramoto::cdw::VoltageTrace {
    let t_end = periods * params.free_period();
    let opts = RunOptions {
        dt: default_dt(params),
        t_end,
        record_from: t_end,
        stride: 1000,
    };
    simulate(
        params,
        graph,
        CdwNetworkState::from_phases(params, phases),
        &opts,
    )
    .unwrap()
}

fn closed_form_period(p: &CdwParams) -> f64 {
    let charge = p.r_ch() * p.c * ((p.v_ch() - p.v_th_low) / (p.v_ch() - p.v_th_high)).ln();
    let discharge = p.r_dis() * p.c * ((p.v_th_high - p.v_dis()) / (p.v_th_low - p.v_dis())).ln();
    charge + discharge
}

#[test]
fn free_period_matches_rc_formula() {
    for p in [
        CdwParams::default(),
        CdwParams::with_threshold_fractions(0.25, 0.75),
    ] {
        let want = closed_form_period(&p);
        assert!((p.free_period() / want - 1.0).abs() < 1e-12);
        let g = Graph::from_edges(1, &[]).unwrap();
        let phases = extract_phases(&run(&p, &g, &[0.3], 40.0), 0.5).unwrap();
        assert!(
            (phases.period[0] / want - 1.0).abs() < 1e-3,
            "{} vs {want}",
            phases.period[0]
        );
    }
}

#[test]
fn quarter_period_offset_persists_without_coupling() {
    let p = CdwParams::default();
    let g = Graph::from_edges(2, &[]).unwrap();
    let phases = extract_phases(&run(&p, &g, &[0.0, FRAC_PI_2], 60.0), 0.5).unwrap();
    let lag = phases.difference(0, 1);
    assert!((lag - FRAC_PI_2).abs() < 0.02, "lag {lag}");
}

#[test]
fn synchronized_network_stays_synchronized() {
    let p = CdwParams::default();
    let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let phases = extract_phases(&run(&p, &g, &[1.0; 3], 40.0), 0.5).unwrap();
    for i in 1..3 {
        assert!(phases.difference(0, i).abs() < 1e-6);
    }
    assert!(phases.period_spread() < 1e-9);
}

#[test]
fn coupled_pair_pulls_together() {
    let p = CdwParams::default();
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let trace = run(&p, &g, &[0.0, 0.6], 6000.0);
    let phases = extract_phases(&trace, 0.9).unwrap();
    let start = d_cc(0.6, 0.0).abs();
    let end = phases.difference(0, 1).abs();
    assert!(end < 0.2 * start, "offset {start} -> {end}");
    assert!(phases.period_spread() < 5e-3);
}

#[test]
fn simulation_is_deterministic() {
    let p = CdwParams::default();
    let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let a = run(&p, &g, &[0.0, 1.0, 2.0], 30.0);
    let b = run(&p, &g, &[0.0, 1.0, 2.0], 30.0);
    assert_eq!(a.peaks, b.peaks);
}

#[test]
fn prc_is_linear_and_matches_closed_form() {
    let p = CdwParams::default();
    let w = p.v_th_high - p.v_th_low;
    let n = 40;
    let z1 = phase_response_curve(&p, 0.005 * w, n).unwrap();
    let z2 = phase_response_curve(&p, 0.01 * w, n).unwrap();
    let za: Vec<f64> = (0..n)
        .map(|k| p.analytic_prc(TAU * k as f64 / n as f64))
        .collect();
    let rel = |a: &[f64], b: &[f64]| {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        (num / den).sqrt()
    };
    assert!(rel(&z1, &z2) < 0.05, "linearity {}", rel(&z1, &z2));
    assert!(rel(&z1, &za) < 0.01, "closed form {}", rel(&z1, &za));
}

#[test]
fn interaction_function_is_sine_like() {
    let p = CdwParams::default();
    let n = 400;
    let z: Vec<f64> = (0..n)
        .map(|k| p.analytic_prc(TAU * k as f64 / n as f64))
        .collect();
    let gamma = interaction_function(&z, &limit_cycle_samples(&p, n)).unwrap();
    assert!(gamma[0].abs() < 1e-12);
    let fit = sine_fit(&gamma);
    assert!(fit.sine_dominance >= 5.0, "{fit:?}");
    assert!(fit.relative_residual < 0.1, "{fit:?}");
}
