//! Invariants over random distributions, strategies and profiles.

mod common;

use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use random_horizon::dist::{DistributionSpec, HorizonDistribution};
use random_horizon::learn::{block_distribution, block_indices};
use random_horizon::meta::{
    meta_expected_performance, meta_log_bound, meta_mixture, PerformanceProfile, ProfileFn,
};
use random_horizon::sim::simulate;
use random_horizon::solver::{
    backward_solve, minimax_mixture, minimax_value, single_threshold_approx, solve_optimal,
    surrogate_value, theta,
};
use random_horizon::strategy::{
    mixture_success_probability, success_probability, success_probability_pform, threshold_profile,
    Strategy, StrategySpec, ThresholdMixture,
};

const TOL: f64 = 1e-12;

fn weights(max_len: usize) -> impl proptest::strategy::Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..=max_len)
        .prop_filter("needs positive mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn dist(max_len: usize) -> impl proptest::strategy::Strategy<Value = HorizonDistribution> {
    weights(max_len).prop_map(|w| HorizonDistribution::from_weights(&w).unwrap())
}

fn strat(max_len: usize) -> impl proptest::strategy::Strategy<Value = random_horizon::Strategy> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_len).prop_map(|q| Strategy::new(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_is_linear_in_p(p in dist(30), p2 in dist(30), a in 0.0f64..=1.0) {
        let mix = HorizonDistribution::mixture(&[(a, &p), (1.0 - a, &p2)]).unwrap();
        let (l, l1, l2) = (mix.lambda_sequence(), p.lambda_sequence(), p2.lambda_sequence());
        for i in 1..=mix.len() {
            prop_assert!((l.get(i) - (a * l1.get(i) + (1.0 - a) * l2.get(i))).abs() <= TOL);
        }
    }

    #[test]
    fn both_success_forms_agree(p in dist(40), q in strat(50)) {
        let a = success_probability(&p, &q);
        let b = success_probability_pform(&p, &q);
        prop_assert!((a - b).abs() <= TOL, "{} vs {}", a, b);
        prop_assert!((0.0..=1.0 + TOL).contains(&a));
    }

    #[test]
    fn no_strategy_beats_the_solver_or_theta(p in dist(40), q in strat(40)) {
        let a = success_probability(&p, &q);
        let opt = solve_optimal(&p).value;
        let th = theta(&p).theta;
        prop_assert!(a <= opt + TOL);
        prop_assert!(opt <= th + TOL);
    }

    #[test]
    fn solver_value_is_attained(p in dist(60)) {
        let sol = solve_optimal(&p);
        prop_assert!((success_probability(&p, &sol.q_opt) - sol.value).abs() <= TOL);
        prop_assert!(sol.q_opt.values().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn single_threshold_sandwich(p in dist(80)) {
        let (_, v) = single_threshold_approx(&p);
        let th = theta(&p).theta;
        prop_assert!(th / std::f64::consts::E <= v + TOL);
        prop_assert!(v <= solve_optimal(&p).value + TOL);
    }

    #[test]
    fn threshold_profile_matches_direct_evaluation(p in dist(30)) {
        let prof = threshold_profile(&p.lambda_sequence());
        let n = p.len();
        prop_assert_eq!(prof.len(), n + 1);
        prop_assert!(prof[n].abs() <= TOL);
        for l in 1..=n {
            let q = Strategy::single_threshold(l, n).unwrap();
            prop_assert!((prof[l - 1] - success_probability(&p, &q)).abs() <= TOL);
        }
    }

    #[test]
    fn backward_solve_maximizes_the_surrogate(g in prop::collection::vec(0.0f64..5.0, 1..40), q in strat(40)) {
        let (best, c) = backward_solve(&g);
        let v = surrogate_value(&g, &best);
        prop_assert!((v - c[0]).abs() <= 1e-9 * (1.0 + v.abs()));
        prop_assert!(surrogate_value(&g, &q) <= v + 1e-9 * (1.0 + v.abs()));
    }

    #[test]
    fn blocking_moves_value_by_at_most_rho_minus_one(p in dist(150), q in strat(200), rho in 1.0001f64..=2.0) {
        let b = block_distribution(&p, rho).unwrap();
        let diff = (success_probability(&p, &q) - success_probability(&b, &q)).abs();
        prop_assert!(diff <= rho - 1.0 + TOL, "diff {} rho {}", diff, rho);
        let mass: f64 = b.probs().iter().sum();
        let orig: f64 = p.probs().iter().sum();
        prop_assert!((mass - orig).abs() <= 1e-14);
    }

    #[test]
    fn block_grid_is_strictly_increasing_ceilings(rho in 1.001f64..3.0, cap in 1usize..5000) {
        let grid = block_indices(rho, cap).unwrap();
        prop_assert!(grid.indices().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(grid.last() <= cap);
        prop_assert_eq!(grid.get(0), 0);
        for i in 1..=grid.last() {
            let l = grid.block_of(i).unwrap();
            prop_assert!(grid.get(l - 1) < i && i <= grid.get(l));
        }
    }

    #[test]
    fn minimax_mixture_is_an_equalizer(w in weights(60)) {
        let nbar = w.len();
        let p = HorizonDistribution::from_weights(&w).unwrap();
        let mix = minimax_mixture(nbar).unwrap();
        let v = mixture_success_probability(&p, &mix);
        prop_assert!((v - 1.0 / (1.0 + common::harmonic(nbar - 1))).abs() <= TOL);
        prop_assert!((v - minimax_value(nbar)).abs() <= TOL);
    }

    #[test]
    fn mixture_value_is_the_weighted_threshold_values(p in dist(30), w in weights(30)) {
        let mix = ThresholdMixture::new({
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        }).unwrap();
        let n = p.len().max(w.len());
        let direct: f64 = mix.weights().iter().enumerate()
            .map(|(k, x)| x * success_probability(&p, &Strategy::single_threshold(k + 1, n).unwrap()))
            .sum();
        prop_assert!((mixture_success_probability(&p, &mix) - direct).abs() <= TOL);
    }

    #[test]
    fn meta_mixture_is_flat_and_beats_log_bound(
        steps in prop::collection::vec(0.0f64..2.0, 1..60),
        base in 0.1f64..5.0,
        c0 in 0.05f64..=1.0,
        start in 1usize..20,
    ) {
        let mut values = vec![base];
        for s in &steps {
            let last = *values.last().unwrap();
            values.push(last + s);
        }
        let n_hi = start + values.len() - 1;
        let prof = PerformanceProfile::new(c0, ProfileFn::Table { start, values }).unwrap();
        let mix = meta_mixture(&prof, start, n_hi).unwrap();
        prop_assert!((mix.weights.iter().sum::<f64>() - 1.0).abs() <= TOL);
        prop_assert!(mix.weights.iter().all(|&x| x >= 0.0));
        for n in start..=n_hi {
            let v = meta_expected_performance(&mix, &prof, n).unwrap();
            prop_assert!((v - mix.guarantee).abs() <= TOL);
        }
        prop_assert!(mix.guarantee >= meta_log_bound(&prof, start, n_hi).unwrap() - TOL);
    }

    #[test]
    fn distribution_json_round_trips(p in dist(30)) {
        let text = serde_json::to_string(&p.to_spec()).unwrap();
        let back = serde_json::from_str::<DistributionSpec>(&text).unwrap().build().unwrap();
        prop_assert_eq!(back.probs(), p.probs());
    }

    #[test]
    fn strategy_json_round_trips(q in strat(30)) {
        let text = serde_json::to_string(&q.to_spec()).unwrap();
        let back = serde_json::from_str::<StrategySpec>(&text).unwrap().build(q.len()).unwrap();
        prop_assert_eq!(back.values(), q.values());
    }

    #[test]
    fn sampler_stays_in_support(p in dist(30), seed in any::<u64>()) {
        let s = p.sampler();
        let mut r = random_horizon::rng::stream_rng(seed, 0);
        for _ in 0..50 {
            let n = s.sample(&mut r);
            prop_assert!(n >= 1 && n <= p.len() && p.prob(n) > 0.0);
        }
    }

    #[test]
    fn dirichlet_draws_lie_on_the_simplex(n in 1usize..200, seed in any::<u64>()) {
        let p = HorizonDistribution::sample_dirichlet_uniform(n, seed).unwrap();
        prop_assert_eq!(p.len(), n);
        prop_assert!(p.probs().iter().all(|&v| v >= 0.0));
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= TOL);
    }
}

#[test]
fn simulation_ignores_thread_count() {
    let p = HorizonDistribution::uniform(40).unwrap();
    let q = Strategy::single_threshold(8, 40).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate(&p, &q, 20_000, 99).unwrap())
    };
    assert_eq!(run(1), run(4));
}
