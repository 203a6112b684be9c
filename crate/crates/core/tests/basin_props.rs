use std::f64::consts::PI;

use honeycomb_kuramoto::basin::{basin_sweep, retrieval_trial, theoretical_radius, TrialOptions};
use honeycomb_kuramoto::{BigUint, HoneycombSpec};

fn spec(m: usize, n_c: usize) -> HoneycombSpec {
    HoneycombSpec::new(m, n_c).unwrap()
}

#[test]
fn radius_case_table() {
    // pi r / (2 n_c) with r = ((n_c - 1) mod 4) + 1, evaluated by hand
    let cases = [(5, 1.0), (6, 2.0), (7, 3.0), (8, 4.0), (9, 1.0), (12, 4.0)];
    for (n_c, r) in cases {
        let b = theoretical_radius(n_c).unwrap();
        assert_eq!(b.r as f64, r);
        assert!((b.radius - PI * r / (2.0 * n_c as f64)).abs() < 1e-15);
    }
}

#[test]
fn inside_the_bound_always_retrieves() {
    let rep = basin_sweep(spec(10, 5), &[0.3], 100, 4, &TrialOptions::default()).unwrap();
    assert_eq!(rep.success_rate, vec![1.0]);
}

#[test]
fn failure_onset_lies_beyond_the_bound() {
    for n_c in 5..=8 {
        let radius = theoretical_radius(n_c).unwrap().radius;
        let mags: Vec<f64> = [0.5, 0.8, 1.0].iter().map(|f| f * radius).collect();
        let rep = basin_sweep(spec(2, n_c), &mags, 200, 8, &TrialOptions::default()).unwrap();
        assert_eq!(
            rep.first_failure(),
            None,
            "n_c={n_c}: {:?}",
            rep.success_rate
        );
    }
}

#[test]
fn huge_noise_usually_fails() {
    let rep = basin_sweep(spec(10, 5), &[PI], 100, 2, &TrialOptions::default()).unwrap();
    assert!(rep.success_rate[0] < 0.5, "{:?}", rep.success_rate);
}

#[test]
fn reports_are_reproducible() {
    let mags = [0.2, 0.6, 1.0];
    let a = basin_sweep(spec(4, 6), &mags, 40, 99, &TrialOptions::default()).unwrap();
    let b = basin_sweep(spec(4, 6), &mags, 40, 99, &TrialOptions::default()).unwrap();
    assert_eq!(a.to_csv(true), b.to_csv(true));
    let c = basin_sweep(spec(4, 6), &mags, 40, 100, &TrialOptions::default()).unwrap();
    assert_eq!(c.seed, 100);
}

#[test]
fn single_trial_by_index() {
    let out = retrieval_trial(
        &honeycomb_kuramoto::build_honeycomb(spec(2, 5)),
        &BigUint::from(6u32),
        0.2,
        1,
        &TrialOptions::default(),
    )
    .unwrap();
    assert!(out.success && out.converged);
}
