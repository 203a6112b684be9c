use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use honeycomb_kuramoto::codec::{self, SNAP_TOL};
use honeycomb_kuramoto::winding::{check_angle_law, is_phase_cohesive};
use honeycomb_kuramoto::{
    build_honeycomb, d_cc, winding_number, winding_vector, BigUint, HoneycombSpec,
};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn spec(m: usize, n_c: usize) -> HoneycombSpec {
    HoneycombSpec::new(m, n_c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn d_cc_is_half_open(a in -50.0..50.0f64, b in -50.0..50.0f64) {
        let d = d_cc(a, b);
        prop_assert!((-PI..PI).contains(&d));
        // congruent to a - b modulo 2 pi
        let k = ((a - b - d) / TAU).round();
        prop_assert!((a - b - d - k * TAU).abs() < 1e-9);
    }

    #[test]
    fn d_cc_antisymmetric_off_boundary(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        prop_assume!((d_cc(a, b).abs() - PI).abs() > 1e-9);
        prop_assert!((d_cc(a, b) + d_cc(b, a)).abs() < 1e-12);
    }

    #[test]
    fn winding_ignores_rotation_and_lifts(
        m in 1usize..=3, n_c in 5usize..=8, seed in any::<u64>(), c in -20.0..20.0f64, lift in 0usize..30,
    ) {
        let hc = build_honeycomb(spec(m, n_c));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..hc.node_count()).map(|_| rng.gen_range(0.0..TAU)).collect();
        let base = winding_vector(&hc.cycles, &theta).unwrap();
        let rotated: Vec<f64> = theta.iter().map(|t| t + c).collect();
        prop_assert_eq!(winding_vector(&hc.cycles, &rotated).unwrap(), base.clone());
        let mut lifted = theta.clone();
        lifted[lift % theta.len()] += TAU;
        prop_assert_eq!(winding_vector(&hc.cycles, &lifted).unwrap(), base);
    }

    #[test]
    fn sampled_round_trip_at_large_capacity(m in 20usize..80, n_c in 5usize..=12, seed in any::<u64>()) {
        let sp = spec(m, n_c);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k = honeycomb_kuramoto::basin::random_windings(sp, &mut rng);
        let s = codec::index_of_windings(sp, &k).unwrap();
        prop_assert!(s < codec::capacity(sp));
        let cfg = codec::encode(sp, &s).unwrap();
        prop_assert_eq!(codec::decode(sp, &cfg.theta, SNAP_TOL).unwrap(), s);
    }
}

#[test]
fn winding_on_hand_built_cycles() {
    let hc = build_honeycomb(spec(1, 5));
    let cycle = &hc.cycles.cycles()[0];
    let twist: Vec<f64> = (0..5).map(|i| i as f64 * TAU / 5.0).collect();
    assert_eq!(winding_number(cycle, &twist).unwrap(), 1);
    let back: Vec<f64> = twist.iter().map(|t| -t).collect();
    assert_eq!(winding_number(cycle, &back).unwrap(), -1);
    let double: Vec<f64> = (0..5).map(|i| i as f64 * 2.0 * TAU / 5.0).collect();
    assert_eq!(winding_number(cycle, &double).unwrap(), 2);
}

#[test]
fn encode_is_injective_and_covers_admissible_set() {
    for (m, n_c) in [(2, 5), (3, 9), (4, 6)] {
        let sp = spec(m, n_c);
        let hc = build_honeycomb(sp);
        let cap = codec::capacity(sp).to_u64().unwrap();
        let mut seen = HashSet::new();
        for s in 0..cap {
            let cfg = codec::encode(sp, &BigUint::from(s)).unwrap();
            assert!(cfg.k.within(sp.max_winding()));
            assert_eq!(winding_vector(&hc.cycles, &cfg.theta).unwrap(), cfg.k);
            assert!(seen.insert(cfg.k));
        }
        assert_eq!(
            seen.len() as u64,
            (2 * sp.max_winding() as u64 + 1).pow(m as u32)
        );
    }
}

#[test]
fn two_pentagon_table() {
    let sp = spec(2, 5);
    let expected = [
        [-1, -1],
        [-1, 0],
        [-1, 1],
        [0, -1],
        [0, 0],
        [0, 1],
        [1, -1],
        [1, 0],
        [1, 1],
    ];
    for (s, k) in expected.iter().enumerate() {
        let cfg = codec::encode(sp, &BigUint::from(s)).unwrap();
        assert_eq!(cfg.k.as_slice(), k);
    }
}

#[test]
fn encode_output_is_stable() {
    let cfg = codec::encode(spec(2, 5), &BigUint::from(6u32)).unwrap();
    let step = TAU / 5.0;
    let want = [
        0.0,
        step,
        2.0 * step,
        3.0 * step,
        4.0 * step,
        3.0 * step,
        2.0 * step,
        step,
        0.0,
    ];
    for (got, want) in cfg.theta.iter().zip(want) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn angle_law_on_rejection_samples() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for m in 1..=3 {
        for n_c in 5..=9 {
            let hc = build_honeycomb(spec(m, n_c));
            let mut accepted = 0;
            while accepted < 200 {
                // the spanning path fixes every node up to rotation
                let mut theta = vec![0.0; hc.node_count()];
                for i in 1..theta.len() {
                    theta[i] = theta[i - 1] + rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
                }
                if !is_phase_cohesive(&hc.cycles, &theta) {
                    continue;
                }
                assert!(check_angle_law(&hc.cycles, &theta, n_c).unwrap());
                accepted += 1;
            }
        }
    }
}

#[test]
fn decode_tolerates_small_noise() {
    let sp = spec(3, 7);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for s in 0..27u32 {
        let cfg = codec::encode(sp, &BigUint::from(s)).unwrap();
        let noisy: Vec<f64> = cfg
            .theta
            .iter()
            .map(|t| t + rng.gen_range(-0.05..0.05))
            .collect();
        assert_eq!(
            codec::decode(sp, &noisy, SNAP_TOL).unwrap(),
            BigUint::from(s)
        );
    }
}
