use std::f64::consts::{PI, TAU};
use std::ops::ControlFlow;

use honeycomb_kuramoto::basin::theoretical_radius;
use honeycomb_kuramoto::codec::{self, config_from_windings};
use honeycomb_kuramoto::dynamics::{
    self, classify_equilibrium, energy, hessian, integrate, integrate_observed,
    quadratic_form_edge_sum, rhs, IntegrateOptions, Verdict, TOL_EQ, TOL_ZERO,
};
use honeycomb_kuramoto::linalg::{mean, project_mean_zero, symmetric_eigen};
use honeycomb_kuramoto::{
    build_honeycomb, winding_vector, BigUint, Honeycomb, HoneycombSpec, WindingVector,
};
use proptest::prelude::*;

fn honeycomb() -> impl Strategy<Value = Honeycomb> {
    (1usize..=4, 5usize..=9)
        .prop_map(|(m, n_c)| build_honeycomb(HoneycombSpec::new(m, n_c).unwrap()))
}

fn with_state() -> impl Strategy<Value = (Honeycomb, Vec<f64>)> {
    honeycomb().prop_flat_map(|hc| {
        let n = hc.node_count();
        (Just(hc), prop::collection::vec(0.0..TAU, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_is_negative_gradient((hc, theta) in with_state()) {
        let h = 1e-5;
        let f = rhs(&hc.graph, &theta, 1.0).unwrap();
        for i in 0..theta.len() {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (energy(&hc.graph, &up).unwrap().energy - energy(&hc.graph, &dn).unwrap().energy) / (2.0 * h);
            prop_assert!((fd + f[i]).abs() < 1e-6, "node {}: fd {} rhs {}", i, fd, f[i]);
        }
    }

    #[test]
    fn quadratic_form_identity((hc, theta) in with_state(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..theta.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let matrix = hessian(&hc.graph, &theta).unwrap().quadratic_form(&v);
        prop_assert!((matrix - quadratic_form_edge_sum(&hc.graph, &theta, &v)).abs() < 1e-10);
    }

    #[test]
    fn rhs_sums_to_zero((hc, theta) in with_state()) {
        let f = rhs(&hc.graph, &theta, 1.0).unwrap();
        prop_assert!(f.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn energy_decreases_and_mean_is_conserved((hc, theta) in with_state()) {
        let opts = IntegrateOptions { dt: 0.05, t_max: 100.0, monitor_energy: false, ..IntegrateOptions::default() };
        let m0 = mean(&theta);
        let mut prev = f64::INFINITY;
        integrate_observed(&hc.graph, &theta, &opts, |_, th, _| {
            let u = energy(&hc.graph, th).unwrap().energy;
            assert!(u <= prev + 1e-9, "energy rose from {prev} to {u}");
            assert!((mean(th) - m0).abs() < 1e-8);
            prev = u;
            ControlFlow::Continue(())
        }).unwrap();
    }

    /// Started inside the guaranteed ball with matching mean, the largest
    /// per-node deviation from the target never grows.
    #[test]
    fn infinity_norm_nonexpansion(m in 1usize..=3, n_c in 5usize..=8, seed in any::<u64>(), frac in 0.1..0.95f64) {
        use rand::{Rng, SeedableRng};
        let spec = HoneycombSpec::new(m, n_c).unwrap();
        let hc = build_honeycomb(spec);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let bound = spec.max_winding();
        let k = WindingVector((0..m).map(|_| rng.gen_range(-bound..=bound)).collect());
        let star = config_from_windings(spec, &k).unwrap().theta;
        let radius = theoretical_radius(n_c).unwrap().radius;
        let mut noise: Vec<f64> = (0..star.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_mean_zero(&mut noise);
        let scale = frac * radius / noise.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let theta0: Vec<f64> = star.iter().zip(&noise).map(|(s, x)| s + scale * x).collect();
        let opts = IntegrateOptions { dt: 0.05, t_max: 300.0, ..IntegrateOptions::default() };
        let mut prev = f64::INFINITY;
        let traj = integrate_observed(&hc.graph, &theta0, &opts, |_, th, _| {
            let dev = th.iter().zip(&star).fold(0.0f64, |a, (x, s)| a.max((x - s).abs()));
            assert!(dev <= prev + 1e-7, "deviation grew from {prev} to {dev}");
            prev = dev;
            ControlFlow::Continue(())
        }).unwrap();
        prop_assert_eq!(winding_vector(&hc.cycles, &traj.state.theta).unwrap(), k);
    }
}

#[test]
fn encoded_states_are_stable_equilibria() {
    for (m, n_c) in [(1, 5), (2, 6), (3, 9), (2, 8)] {
        let spec = HoneycombSpec::new(m, n_c).unwrap();
        let hc = build_honeycomb(spec);
        let cap: u64 = codec::capacity(spec).try_into().unwrap();
        for s in 0..cap {
            let theta = codec::encode(spec, &BigUint::from(s)).unwrap().theta;
            assert!(dynamics::residual(&hc.graph, &theta).unwrap() < 1e-10);
            let rep = classify_equilibrium(&hc.graph, &theta, TOL_EQ, TOL_ZERO).unwrap();
            assert_eq!(rep.verdict, Verdict::Stable, "m={m} n_c={n_c} s={s}");
        }
    }
}

#[test]
fn perturbed_splay_returns_to_its_winding() {
    use rand::{Rng, SeedableRng};
    let spec = HoneycombSpec::new(2, 5).unwrap();
    let hc = build_honeycomb(spec);
    let k = WindingVector(vec![1, -1]);
    let star = config_from_windings(spec, &k).unwrap().theta;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let theta0: Vec<f64> = star.iter().map(|s| s + rng.gen_range(-0.1..=0.1)).collect();
    let traj = integrate(&hc.graph, &theta0, &IntegrateOptions::default()).unwrap();
    assert!(traj.converged());
    assert_eq!(winding_vector(&hc.cycles, &traj.state.theta).unwrap(), k);
}

#[test]
fn hessian_spectrum_matches_classification() {
    let hc = build_honeycomb(HoneycombSpec::new(1, 5).unwrap());
    let theta: Vec<f64> = (0..5).map(|i| i as f64 * 4.0 * PI / 5.0).collect();
    let h = hessian(&hc.graph, &theta).unwrap();
    // cos(4pi/5) times the cycle Laplacian
    let l = hc.graph.laplacian().scaled((4.0 * PI / 5.0).cos());
    assert!(h.max_abs_diff(&l) < 1e-12);
    let eig = symmetric_eigen(&h).unwrap();
    assert!(eig.values[0] < -1.0);
    let rep = classify_equilibrium(&hc.graph, &theta, TOL_EQ, TOL_ZERO).unwrap();
    assert_eq!(rep.verdict, Verdict::Unstable);
}
