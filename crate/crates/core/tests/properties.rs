//! Property tests for the structural invariants of each module.

use mudiv::analysis::{check_cm, lt_order_check, ordering_consequence_check, Relation, LT_GRID, LT_TOL};
use mudiv::metrics::{avg_error_fixed_n, avg_error_random_n, ergodic_capacity_fixed_n, ergodic_capacity_random_n};
use mudiv::montecarlo::mc_error_rate;
use mudiv::numerics::{
    gamma, integrate_semi_infinite, lower_incomplete_gamma, upper_incomplete_gamma, QuadratureSpec,
};
use mudiv::selection::outage_poisson;
use mudiv::cli::ExperimentConfig;
use mudiv::{BestGainLaw, ErrorModel, FadingModel, SimConfig, SnrPoint, UserCountModel};
use proptest::prelude::*;

fn fading() -> impl Strategy<Value = FadingModel> {
    prop_oneof![
        Just(FadingModel::Rayleigh),
        (0.5f64..6.0).prop_map(|m| FadingModel::nakagami(m).unwrap()),
        (0.0f64..8.0).prop_map(|k| FadingModel::rician(k).unwrap()),
    ]
}

fn users() -> impl Strategy<Value = UserCountModel> {
    prop_oneof![
        (1u64..20).prop_map(UserCountModel::deterministic),
        (0.1f64..20.0).prop_map(|l| UserCountModel::poisson(l).unwrap()),
        (0.05f64..0.95).prop_map(|p| UserCountModel::geometric(p).unwrap()),
        (0.1f64..20.0).prop_map(|l| UserCountModel::zero_truncated_poisson(l).unwrap()),
    ]
}

fn err_model() -> impl Strategy<Value = ErrorModel> {
    prop_oneof![
        (0.2f64..1.0, 0.2f64..3.0).prop_map(|(a, e)| ErrorModel::exponential(a, e).unwrap()),
        (0.2f64..1.0, 0.2f64..3.0).prop_map(|(a, e)| ErrorModel::q_function(a, e).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incomplete_gamma_halves_sum_to_gamma(s in 0.3f64..30.0, x in 0.01f64..60.0) {
        let total = lower_incomplete_gamma(s, x).unwrap() + upper_incomplete_gamma(s, x).unwrap();
        prop_assert!((total / gamma(s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, r in 0.2f64..5.0) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (-r * x).exp();
        let g = |x: f64| x * x * (-x).exp() / (1.0 + x);
        let lhs = integrate_semi_infinite(|x| a * f(x) + b * g(x), &spec).unwrap();
        let rhs = a * integrate_semi_infinite(f, &spec).unwrap() + b * integrate_semi_infinite(g, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() <= 10.0 * spec.rel_tol * (a.abs() / r + b.abs()) + 1e-14);
    }

    #[test]
    fn quantile_inverts_cdf(f in fading(), p in 1e-6f64..0.999_999) {
        let x = f.quantile(p).unwrap();
        prop_assert!((f.cdf(x).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn pgf_matches_series(u in users(), t in 0.0f64..1.0) {
        let mut sum = 0.0;
        let mut mass = 0.0;
        let mut k = 0u64;
        while 1.0 - mass > 1e-13 && k < 10_000 {
            let p = u.pmf(k);
            sum += p * t.powi(k as i32);
            mass += p;
            k += 1;
        }
        prop_assert!((u.pgf(t).unwrap() - sum).abs() < 1e-10);
    }

    #[test]
    fn best_gain_cdf_is_a_distribution(f in fading(), u in users(), x in 0.0f64..12.0, h in 0.0f64..3.0) {
        let law = BestGainLaw::new(f, u);
        let (a, b) = (law.cdf(x).unwrap(), law.cdf(x + h).unwrap());
        prop_assert!((0.0..=1.0).contains(&a) && a <= b);
        prop_assert!((law.cdf(0.0).unwrap() - law.atom_at_zero()).abs() < 1e-15);
        prop_assert!((a + law.sf(x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outage_falls_as_mean_grows(f in fading(), l in 0.1f64..30.0, r in 1.01f64..4.0, x in 0.0f64..8.0) {
        prop_assert!(outage_poisson(l * r, &f, x).unwrap() <= outage_poisson(l, &f, x).unwrap() + 1e-15);
    }

    #[test]
    fn random_metrics_are_mixtures(f in fading(), l in 0.5f64..6.0, e in err_model(), db in 0.0f64..20.0) {
        let users = UserCountModel::poisson(l).unwrap();
        let rho = SnrPoint::from_db(db).unwrap();
        let k_max = users.truncation_point(1e-14);
        let (mut err_sum, mut cap_sum) = (users.pmf(0) * e.error_at_zero(), 0.0);
        for k in 1..=k_max {
            let p = users.pmf(k);
            err_sum += p * avg_error_fixed_n(rho, k, &f, &e).unwrap();
            cap_sum += p * ergodic_capacity_fixed_n(rho, k, &f).unwrap();
        }
        let err = avg_error_random_n(rho, &users, &f, &e).unwrap();
        let cap = ergodic_capacity_random_n(rho, &users, &f).unwrap();
        prop_assert!((err - err_sum).abs() <= 1e-7 * err.max(1e-300));
        prop_assert!((cap - cap_sum).abs() <= 1e-7 * cap);
    }

    #[test]
    fn error_rate_is_completely_monotone_in_n(f in fading(), e in err_model(), db in 0.0f64..20.0) {
        let rho = SnrPoint::from_db(db).unwrap();
        let seq: Vec<f64> = (1..=24).map(|n| avg_error_fixed_n(rho, n, &f, &e).unwrap()).collect();
        prop_assert!(check_cm(&seq, 4, 1e-9).unwrap().passed());
    }

    #[test]
    fn lt_order_is_reflexive(u in users()) {
        prop_assert_eq!(lt_order_check(&u, &u, LT_GRID, LT_TOL).unwrap().relation, Relation::Equivalent);
    }

    #[test]
    fn geometric_below_poisson_implies_consequences(mean in 1.0f64..12.0, e in err_model(), f in fading()) {
        let g = UserCountModel::geometric_with_mean(mean).unwrap();
        let p = UserCountModel::poisson(mean).unwrap();
        prop_assert_eq!(lt_order_check(&g, &p, LT_GRID, LT_TOL).unwrap().relation, Relation::XleY);
        let rhos = [0.0, 10.0, 20.0].map(|d| SnrPoint::from_db(d).unwrap());
        prop_assert!(ordering_consequence_check(&g, &p, &f, &e, &rhos).unwrap());
    }

    #[test]
    fn config_text_round_trips(seed in any::<u64>(), trials in 0u64..10_000_000, lo in 0.0f64..40.0, w in 1.0f64..20.0, u in users()) {
        let cfg = ExperimentConfig {
            seed,
            mc_trials: Some(trials),
            window: (lo, lo + w),
            users: vec![u],
            ..ExperimentConfig::default()
        };
        prop_assert_eq!(ExperimentConfig::parse_text(&cfg.to_string()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_ignores_worker_count(seed in any::<u64>(), workers in 2usize..9, u in users(), f in fading()) {
        let law = BestGainLaw::new(f, u);
        let err = ErrorModel::default();
        let rho = SnrPoint::from_db(6.0).unwrap();
        let a = mc_error_rate(rho, &law, &err, &SimConfig::new(20_000, seed, 1).unwrap());
        let b = mc_error_rate(rho, &law, &err, &SimConfig::new(20_000, seed, workers).unwrap());
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
