//! Structural properties of the knapsack oracle and the first-stage
//! objective, checked on random instances.

mod support;

use adaptive_seeding::knapsack::{Item, SortedItemList};
use rand::seq::SliceRandom;
use rand::Rng;
use support::{oracle_value, random_instance, random_items, rng};

fn value(items: &[Item], budget: f64) -> f64 {
    SortedItemList::new(items.to_vec())
        .unwrap()
        .solve(budget)
        .unwrap()
}

fn with(items: &[Item], extra: &[Item]) -> Vec<Item> {
    let mut v = items.to_vec();
    v.extend_from_slice(extra);
    v
}

#[test]
fn marginal_grows_with_budget() {
    let mut r = rng(21);
    for _ in 0..100 {
        let n = r.gen_range(1..=12);
        let items = random_items(&mut r, n);
        let (x, t) = items.split_last().unwrap();
        let t: Vec<Item> = t.iter().copied().filter(|_| r.gen_bool(0.7)).collect();
        let b = r.gen_range(0.0..5.0);
        let c = b + r.gen_range(0.0..5.0);
        let gain = |budget| value(&with(&t, &[*x]), budget) - value(&t, budget);
        assert!(gain(c) >= gain(b) - 1e-9);
    }
}

#[test]
fn oracle_submodular_in_items() {
    let mut r = rng(22);
    for _ in 0..100 {
        let n = r.gen_range(2..=12);
        let mut items = random_items(&mut r, n);
        items.shuffle(&mut r);
        let x = items.pop().unwrap();
        let y = items.pop().unwrap();
        let t: Vec<Item> = items.into_iter().filter(|_| r.gen_bool(0.6)).collect();
        let b = r.gen_range(0.0..5.0);
        let lhs = value(&with(&t, &[x]), b) - value(&t, b);
        let rhs = value(&with(&t, &[x, y]), b) - value(&with(&t, &[y]), b);
        assert!(lhs >= rhs - 1e-9, "{lhs} < {rhs}");
    }
}

#[test]
fn first_stage_objective_monotone_submodular() {
    let mut r = rng(23);
    for _ in 0..100 {
        let inst = random_instance(&mut r, 8, 12);
        let m = inst.core_len();
        let b = r.gen_range(0.0..5.0);
        let big: Vec<usize> = (0..m).filter(|_| r.gen_bool(0.5)).collect();
        let small: Vec<usize> = big.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
        let f = |s: &[usize]| oracle_value(&inst, s, b);
        assert!(f(&small) <= f(&big) + 1e-9);
        for x in (0..m).filter(|x| !big.contains(x)) {
            let gain_small = f(&[small.as_slice(), &[x]].concat()) - f(&small);
            let gain_big = f(&[big.as_slice(), &[x]].concat()) - f(&big);
            assert!(gain_small >= gain_big - 1e-9);
        }
    }
}
