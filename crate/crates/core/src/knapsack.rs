//! Fractional knapsack oracle for the second stage.
//!
//! `O(T, b)` is the best expected value obtainable by choosing an allocation
//! `q ∈ [0,1]^T` with `Σ p_u q_u ≤ b`, where item `u` yields `p_u q_u w_u`.
//! The optimum fills items in order of non-increasing weight, which makes
//! `O(T, ·)` concave and piecewise linear with slopes equal to the weights.

use std::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub id: usize,
    pub weight: f64,
    pub prob: f64,
}

impl Item {
    pub fn new(id: usize, weight: f64, prob: f64) -> Self {
        Item { id, weight, prob }
    }
}

/// Weight order: non-increasing weight, ties by ascending id.
pub fn weight_order(a: &Item, b: &Item) -> Ordering {
    b.weight.total_cmp(&a.weight).then(a.id.cmp(&b.id))
}

/// Items in weight order with prefix sums of `p` and `p·w`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SortedItemList {
    items: Vec<Item>,
    // prefix_p[i] = Σ_{k<i} p_k
    prefix_p: Vec<f64>,
    prefix_pw: Vec<f64>,
}

impl SortedItemList {
    /// Sorts `items` into weight order. Repeated ids keep their first
    /// occurrence.
    pub fn new(mut items: Vec<Item>) -> Result<Self> {
        validate(&items)?;
        items.sort_by(weight_order);
        items.dedup_by_key(|it| it.id);
        Ok(Self::build(items))
    }

    /// Wraps items already in weight order; fails if they are not.
    pub fn from_sorted(items: Vec<Item>) -> Result<Self> {
        validate(&items)?;
        if items
            .windows(2)
            .any(|w| weight_order(&w[0], &w[1]) != Ordering::Less)
        {
            return Err(Error::param("items are not in strict weight order"));
        }
        Ok(Self::build(items))
    }

    fn build(items: Vec<Item>) -> Self {
        let mut prefix_p = Vec::with_capacity(items.len() + 1);
        let mut prefix_pw = Vec::with_capacity(items.len() + 1);
        let (mut sp, mut spw) = (0.0, 0.0);
        prefix_p.push(0.0);
        prefix_pw.push(0.0);
        for it in &items {
            sp += it.prob;
            spw += it.prob * it.weight;
            prefix_p.push(sp);
            prefix_pw.push(spw);
        }
        SortedItemList {
            items,
            prefix_p,
            prefix_pw,
        }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_prob(&self) -> f64 {
        *self.prefix_p.last().unwrap_or(&0.0)
    }

    pub fn total_value(&self) -> f64 {
        *self.prefix_pw.last().unwrap_or(&0.0)
    }

    /// `O(T, b)` via the prefix sums: locate the first item whose cumulative
    /// probability exceeds `b` and fill it fractionally.
    pub fn solve(&self, budget: f64) -> Result<f64> {
        check_budget(budget)?;
        // index of the first prefix strictly greater than budget
        let i = self.prefix_p.partition_point(|&s| s <= budget);
        if i == self.prefix_p.len() {
            return Ok(self.total_value());
        }
        // items 0..i-1 fit entirely, item i-1 is the split item
        let split = i - 1;
        let used = self.prefix_p[split];
        Ok(self.prefix_pw[split] + (budget - used) * self.items[split].weight)
    }

    /// Optimal allocation `q` (aligned with `items()`) for budget `b`.
    pub fn allocation(&self, budget: f64) -> Result<Vec<f64>> {
        check_budget(budget)?;
        let mut q = vec![0.0; self.items.len()];
        let mut left = budget;
        for (qi, it) in q.iter_mut().zip(&self.items) {
            if it.prob == 0.0 {
                continue;
            }
            if it.prob <= left {
                *qi = 1.0;
                left -= it.prob;
            } else {
                *qi = left / it.prob;
                break;
            }
        }
        Ok(q)
    }
}

fn validate(items: &[Item]) -> Result<()> {
    for it in items {
        if !(it.weight >= 0.0 && it.weight.is_finite()) {
            return Err(Error::param(format!(
                "item {} has invalid weight {}",
                it.id, it.weight
            )));
        }
        if !(0.0..=1.0).contains(&it.prob) {
            return Err(Error::param(format!(
                "item {} has invalid probability {}",
                it.id, it.prob
            )));
        }
    }
    Ok(())
}

fn check_budget(budget: f64) -> Result<()> {
    if budget >= 0.0 && !budget.is_nan() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "budget must be non-negative, got {budget}"
        )))
    }
}

pub fn solve(list: &SortedItemList, budget: f64) -> Result<f64> {
    list.solve(budget)
}

/// Greedy fill over a weight-ordered stream of items.
fn fill<I: Iterator<Item = Item>>(items: I, budget: f64) -> f64 {
    let mut used = 0.0;
    let mut value = 0.0;
    for it in items {
        if it.prob == 0.0 {
            continue;
        }
        if used + it.prob > budget {
            return value + (budget - used) * it.weight;
        }
        used += it.prob;
        value += it.prob * it.weight;
    }
    value
}

/// Walks two weight-ordered lists as one, yielding shared ids once.
struct Merge<'a> {
    a: &'a [Item],
    b: &'a [Item],
}

impl Iterator for Merge<'_> {
    type Item = Item;

    fn next(&mut self) -> Option<Item> {
        match (self.a.first(), self.b.first()) {
            (None, None) => None,
            (Some(&x), None) => {
                self.a = &self.a[1..];
                Some(x)
            }
            (None, Some(&y)) => {
                self.b = &self.b[1..];
                Some(y)
            }
            (Some(&x), Some(&y)) => {
                if x.id == y.id {
                    self.a = &self.a[1..];
                    self.b = &self.b[1..];
                    Some(x)
                } else if weight_order(&x, &y) == Ordering::Less {
                    self.a = &self.a[1..];
                    Some(x)
                } else {
                    self.b = &self.b[1..];
                    Some(y)
                }
            }
        }
    }
}

/// `O(A ∪ B, b)` without materializing the union. The scan stops as soon
/// as the budget is exhausted. An id present in both lists counts once.
pub fn merged_solve(a: &SortedItemList, b: &SortedItemList, budget: f64) -> Result<f64> {
    check_budget(budget)?;
    if b.is_empty() {
        return a.solve(budget);
    }
    Ok(fill(
        Merge {
            a: &a.items,
            b: &b.items,
        },
        budget,
    ))
}

/// `O(S ∪ X, b) − O(S, b)`, never negative.
pub fn marginal(s: &SortedItemList, x: &SortedItemList, budget: f64) -> Result<f64> {
    check_budget(budget)?;
    // both terms go through the same scan so that x ⊆ s gives exactly 0
    let with = fill(
        Merge {
            a: &s.items,
            b: &x.items,
        },
        budget,
    );
    let without = fill(s.items.iter().copied(), budget);
    Ok((with - without).max(0.0))
}
