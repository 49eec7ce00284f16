mod support;

use adaptive_seeding::greedy::{
    greedy_for_split, run, run_sample_and_prune, GreedyOptions, SampleAndPrune, SplitStrategy,
};
use proptest::prelude::*;
use rand::Rng;
use support::{opt_non_adaptive, oracle_value, random_instance, random_instance_sized, rng};

const GREEDY_FACTOR: f64 = 1.0 - 1.0 / std::f64::consts::E;

#[test]
fn greedy_within_factor_of_optimum() {
    let mut r = rng(31);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 8, 12);
        let k = r.gen_range(2..=inst.core_len() + 3);
        let opt = opt_non_adaptive(&inst, k);
        let sol = run(&inst, k, &GreedyOptions::default());
        assert!(
            sol.value >= GREEDY_FACTOR * opt - 1e-9,
            "{} < {GREEDY_FACTOR}·{opt}",
            sol.value
        );
        assert!(sol.value <= opt + 1e-9);
        let direct = oracle_value(&inst, &sol.seeds, (k - sol.seeds.len()) as f64);
        assert!((direct - sol.value).abs() <= 1e-9);
    }
}

#[test]
fn lazy_matches_plain() {
    let mut r = rng(32);
    for _ in 0..100 {
        let inst = random_instance(&mut r, 10, 30);
        let k = r.gen_range(2..12);
        for t in 1..k {
            let plain = greedy_for_split(&inst, t, k - t, false);
            let lazy = greedy_for_split(&inst, t, k - t, true);
            assert_eq!(plain.seeds, lazy.seeds);
            assert_eq!(plain.value, lazy.value);
        }
    }
}

#[test]
fn geometric_splits_keep_half() {
    let mut r = rng(33);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 8, 20);
        let k = r.gen_range(2..20);
        let all = run(&inst, k, &GreedyOptions::default());
        let geo = run(
            &inst,
            k,
            &GreedyOptions {
                strategy: SplitStrategy::Geometric { epsilon: 1.0 },
                ..Default::default()
            },
        );
        assert!(geo.value >= 0.5 * all.value - 1e-9);
        assert!(geo.split_values.len() <= all.split_values.len());
    }
}

#[test]
fn worker_count_does_not_change_result() {
    let mut r = rng(34);
    for _ in 0..20 {
        let inst = random_instance(&mut r, 12, 60);
        let k = r.gen_range(2..15);
        let one = run(
            &inst,
            k,
            &GreedyOptions {
                workers: 1,
                ..Default::default()
            },
        );
        let eight = run(
            &inst,
            k,
            &GreedyOptions {
                workers: 8,
                ..Default::default()
            },
        );
        assert_eq!(one, eight);
    }
}

#[test]
fn sample_and_prune_within_factor() {
    let mut r = rng(35);
    for i in 0..50 {
        let inst = random_instance(&mut r, 8, 12);
        let k = r.gen_range(2..=inst.core_len() + 3);
        let params = SampleAndPrune {
            epsilon: 0.1,
            sample_size: r.gen_range(1..=inst.core_len()),
            seed: i,
        };
        let (sol, stats) = run_sample_and_prune(&inst, k, &params).unwrap();
        let opt = opt_non_adaptive(&inst, k);
        assert!(sol.value >= (GREEDY_FACTOR - 0.1) * opt - 1e-9);
        assert!(stats.max_sample <= params.sample_size);
    }
}

#[test]
fn evaluations_grow_superlinearly_in_budget() {
    // with every split tried, doubling k at least doubles the marginal evaluations
    let mut r = rng(36);
    let inst = random_instance_sized(&mut r, 60, 400);
    let evals = |k: usize| -> usize {
        (1..k)
            .map(|t| greedy_for_split(&inst, t, k - t, false).evaluations)
            .sum()
    };
    for k in [4, 8, 16] {
        assert!(evals(2 * k) >= 2 * evals(k), "k={k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn solution_is_consistent(seed in 0u64..1000, k in 2usize..10) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 6, 15);
        let sol = run(&inst, k, &GreedyOptions::default());
        prop_assert!(sol.seeds.len() < k);
        prop_assert_eq!(sol.second_stage_budget, k - sol.seeds.len());
        prop_assert!(sol.expected_second_stage_cost(&inst) <= sol.second_stage_budget as f64 + 1e-9);
        prop_assert!(sol.value <= inst.total_expected_weight() + 1e-9);
        prop_assert!(sol.split_values.iter().all(|&(_, v)| v <= sol.value));
    }
}
