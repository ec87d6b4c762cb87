use proptest::prelude::*;

use hardylab::appell::AlphaBeta;
use hardylab::convexity::{
    convexity_bound_check, decay_profile, iterate_step, smallest_root_r, solve_b, theta, BoundInputs, WeightProfile,
};
use hardylab::grid::UniformGrid;
use hardylab::propagator::{free_gaussian_oracle, log_convexity_scan};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn root_solves_the_quadratic(mu in 1e-6f64..0.125) {
        let r = smallest_root_r(mu).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0);
        prop_assert!((r / (4.0 * (1.0 + r * r)) - mu).abs() <= 1e-15 * mu.max(1e-3));
    }

    #[test]
    fn appell_time_maps_invert(alpha in 0.1f64..20.0, beta in 0.1f64..20.0, t in 0.0f64..=1.0) {
        let ab = AlphaBeta::new(alpha, beta).unwrap();
        let s = ab.source_time(t);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((ab.target_time(s) - t).abs() < 1e-12);
        prop_assert!((ab.mu() - 1.0 / (2.0 * alpha * beta)).abs() < 1e-15 * ab.mu());
    }

    #[test]
    fn decay_profile_hits_both_endpoints(alpha in 0.5f64..12.0, beta in 0.5f64..12.0) {
        prop_assume!(alpha * beta >= 4.0);
        let p = decay_profile(alpha, beta).unwrap();
        let [a0, a1] = p.endpoints();
        prop_assert!((a0 * beta * beta - 1.0).abs() < 1e-12);
        prop_assert!((a1 * alpha * alpha - 1.0).abs() < 1e-12);
        for i in 0..=20 {
            prop_assert!(p.eval(i as f64 / 20.0) > 0.0);
        }
    }

    #[test]
    fn first_step_keeps_profiles_even_and_positive(mu in 0.01f64..0.124, bump in 0.0f64..0.15) {
        // a = μ + bump·μ²(1 − t²) has F(a) > 0 for bump < 16μ and an open gate.
        let a = WeightProfile::from_fn(129, |t| mu + bump * mu * mu * (1.0 - t * t)).unwrap();
        let b = solve_b(&a).unwrap();
        prop_assert!(b.values().iter().all(|v| *v >= 0.0));
        let next = iterate_step(&a, &b).unwrap();
        let v = next.values();
        let n = v.len();
        prop_assert!(v.iter().all(|x| *x > 0.0));
        for i in 0..n {
            prop_assert_eq!(v[i], v[n - 1 - i]);
        }
        prop_assert!(next.center_value() >= a.center_value());
    }

    #[test]
    fn theta_runs_from_one_to_zero(c in 0.2f64..3.0, w in 0.0f64..0.9) {
        let g = UniformGrid::new(-1.0, 1.0, 101).unwrap();
        let th = theta(&g.sample(|t| c * (1.0 + w * (3.0 * t).sin()))).unwrap();
        prop_assert_eq!(th[0], 1.0);
        prop_assert_eq!(th[100], 0.0);
        prop_assert!(th.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn log_affine_data_has_zero_slack(slope in -3.0f64..3.0, offset in -2.0f64..2.0) {
        let g = UniformGrid::new(-1.0, 1.0, 65).unwrap();
        let th = theta(&g.sample(|_| 1.0)).unwrap();
        let h: Vec<f64> = g.nodes().iter().map(|t| (slope * t + offset).exp()).collect();
        let slack = convexity_bound_check(&BoundInputs { h: &h, t: &[], m: &[], n: 0.0, theta: &th, eps: 0.0 }).unwrap();
        prop_assert!(slack.abs() < 1e-12);
        prop_assert!(log_convexity_scan(&h).abs() < 1e-12);
    }

    #[test]
    fn gaussian_oracle_modulus(a0 in 0.05f64..2.0, x in -5.0f64..5.0, t in -2.0f64..2.0) {
        let z = free_gaussian_oracle(a0, x, t);
        let d = 1.0 + 16.0 * a0 * a0 * t * t;
        let expect = (-2.0 * a0 * x * x / d).exp() / d.sqrt();
        prop_assert!((z.norm_sqr() - expect).abs() <= 1e-13 * expect.max(1e-300) + 1e-300);
    }
}
