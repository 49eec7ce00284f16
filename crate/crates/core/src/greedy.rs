//! Budget-split greedy for the non-adaptive seeding objective.
//!
//! For a fixed second-stage budget `t`, `f_t(S) = O(N(S), t)` is monotone
//! submodular in the first-stage set `S`, so the classic greedy gives a
//! `1 − 1/e` approximation of the best `S` with `k − t` members. Trying
//! every split `t` and keeping the best answer solves the full problem to
//! the same factor.
//!
//! Marginals are computed by merging the sorted rank list of `N(S)` with the
//! candidate's incidence list on the fly. The scan stops once the budget is
//! spent, so each evaluation touches at most about `t / p_min` items.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use log::warn;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Fill the knapsack from a stream of ranks in weight order.
pub(crate) fn fill_ranks<I: Iterator<Item = u32>>(inst: &Instance, ranks: I, budget: f64) -> f64 {
    let (w, p) = (inst.weights(), inst.probs());
    let mut used = 0.0;
    let mut value = 0.0;
    for r in ranks {
        let r = r as usize;
        let pr = p[r];
        if pr == 0.0 {
            continue;
        }
        if used + pr > budget {
            return value + (budget - used) * w[r];
        }
        used += pr;
        value += pr * w[r];
    }
    value
}

/// Iterates the union of two ascending rank lists.
struct RankMerge<'a> {
    a: &'a [u32],
    b: &'a [u32],
}

impl Iterator for RankMerge<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
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
            (Some(&x), Some(&y)) => match x.cmp(&y) {
                Ordering::Less => {
                    self.a = &self.a[1..];
                    Some(x)
                }
                Ordering::Greater => {
                    self.b = &self.b[1..];
                    Some(y)
                }
                Ordering::Equal => {
                    self.a = &self.a[1..];
                    self.b = &self.b[1..];
                    Some(x)
                }
            },
        }
    }
}

/// Incremental state of `S` for one fixed second-stage budget.
#[derive(Debug, Clone)]
pub struct SplitState<'a> {
    inst: &'a Instance,
    budget: f64,
    chosen: Vec<bool>,
    seeds: Vec<usize>,
    covered: Vec<u32>,
    value: f64,
}

impl<'a> SplitState<'a> {
    pub fn new(inst: &'a Instance, budget: f64) -> Self {
        SplitState {
            inst,
            budget,
            chosen: vec![false; inst.core_len()],
            seeds: Vec::new(),
            covered: Vec::new(),
            value: 0.0,
        }
    }

    /// Current `O(N(S), budget)`.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Seeds in insertion order.
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn contains(&self, x: usize) -> bool {
        self.chosen[x]
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// `O(N(S ∪ {x}), budget) − O(N(S), budget)`.
    pub fn marginal(&self, x: usize) -> f64 {
        if self.chosen[x] {
            return 0.0;
        }
        let merged = RankMerge {
            a: &self.covered,
            b: self.inst.incidence(x),
        };
        (fill_ranks(self.inst, merged, self.budget) - self.value).max(0.0)
    }

    pub fn insert(&mut self, x: usize) {
        if self.chosen[x] {
            return;
        }
        self.chosen[x] = true;
        self.seeds.push(x);
        self.covered = RankMerge {
            a: &self.covered,
            b: self.inst.incidence(x),
        }
        .collect();
        self.value = fill_ranks(self.inst, self.covered.iter().copied(), self.budget);
    }
}

/// Result of the greedy for one split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub second_stage_budget: usize,
    /// Seeds in the order they were picked.
    pub seeds: Vec<usize>,
    /// `O(N(S), t)` at the split's own `t`.
    pub value: f64,
    /// First-stage slots left unused because every marginal was zero.
    pub shortfall: usize,
    pub evaluations: usize,
}

/// Greedy with second-stage budget `t` and `first_budget` first-stage picks.
/// Ties go to the smaller core index; stops once all marginals are zero.
pub fn greedy_for_split(inst: &Instance, t: usize, first_budget: usize, lazy: bool) -> SplitResult {
    let mut state = SplitState::new(inst, t as f64);
    let evaluations = if lazy {
        lazy_fill(&mut state, first_budget)
    } else {
        plain_fill(&mut state, first_budget)
    };
    SplitResult {
        second_stage_budget: t,
        seeds: state.seeds.clone(),
        value: state.value,
        shortfall: first_budget - state.len(),
        evaluations,
    }
}

fn plain_fill(state: &mut SplitState<'_>, first_budget: usize) -> usize {
    let m = state.inst.core_len();
    let mut evaluations = 0;
    while state.len() < first_budget {
        let mut best: Option<(usize, f64)> = None;
        for x in 0..m {
            if state.contains(x) {
                continue;
            }
            let gain = state.marginal(x);
            evaluations += 1;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((x, gain));
            }
        }
        match best {
            Some((x, gain)) if gain > 0.0 => state.insert(x),
            _ => break,
        }
    }
    evaluations
}

#[derive(Debug, PartialEq)]
struct Bound {
    gain: f64,
    x: usize,
    round: usize,
}

impl Eq for Bound {}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on gain, then smallest index
        self.gain.total_cmp(&other.gain).then(other.x.cmp(&self.x))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy evaluation: stale gains are upper bounds by submodularity, so a
/// freshly evaluated entry at the top of the heap is the true argmax.
fn lazy_fill(state: &mut SplitState<'_>, first_budget: usize) -> usize {
    let m = state.inst.core_len();
    let mut heap: BinaryHeap<Bound> = (0..m)
        .map(|x| Bound {
            gain: state.marginal(x),
            x,
            round: 0,
        })
        .collect();
    let mut evaluations = m;
    let mut round = 0;
    while state.len() < first_budget {
        let Some(top) = heap.pop() else { break };
        if top.round == round {
            if top.gain <= 0.0 {
                break;
            }
            state.insert(top.x);
            round += 1;
        } else {
            let gain = state.marginal(top.x);
            evaluations += 1;
            heap.push(Bound {
                gain,
                x: top.x,
                round,
            });
        }
    }
    evaluations
}

/// Which second-stage budgets `t` to try.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitStrategy {
    All,
    /// `t ∈ {⌈(1+ε)^i⌉}`: logarithmically many splits.
    Geometric {
        epsilon: f64,
    },
}

impl SplitStrategy {
    pub fn splits(&self, k: usize) -> Vec<usize> {
        if k < 2 {
            return Vec::new();
        }
        match *self {
            SplitStrategy::All => (1..k).collect(),
            SplitStrategy::Geometric { epsilon } => {
                let mut out: Vec<usize> = Vec::new();
                let mut x = 1.0f64;
                loop {
                    let t = x.ceil() as usize;
                    if t > k - 1 {
                        break;
                    }
                    if out.last() != Some(&t) {
                        out.push(t);
                    }
                    x *= 1.0 + epsilon;
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions {
    pub strategy: SplitStrategy,
    pub workers: usize,
    pub lazy: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            strategy: SplitStrategy::All,
            workers: 1,
            lazy: false,
        }
    }
}

/// A first-stage set with the second-stage allocation that realizes its
/// non-adaptive value.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedingSolution {
    pub budget: usize,
    /// Core indices, ascending.
    pub seeds: Vec<usize>,
    pub second_stage_budget: usize,
    /// `(rank, q)` over `N(S)` in rank order.
    pub allocation: Vec<(u32, f64)>,
    pub value: f64,
    /// `(t, value)` for every split tried.
    pub split_values: Vec<(usize, f64)>,
}

impl SeedingSolution {
    pub fn empty(budget: usize) -> Self {
        SeedingSolution {
            budget,
            seeds: Vec::new(),
            second_stage_budget: budget,
            allocation: Vec::new(),
            value: 0.0,
            split_values: Vec::new(),
        }
    }

    /// Completes `seeds` with the optimal allocation of `k − |S|`.
    pub fn from_seeds(inst: &Instance, budget: usize, seeds: &[usize]) -> Self {
        let mut seeds = seeds.to_vec();
        seeds.sort_unstable();
        seeds.dedup();
        let t = budget.saturating_sub(seeds.len());
        let ranks = inst.neighborhood(&seeds);
        let list = inst.item_list(&ranks);
        let q = list.allocation(t as f64).expect("non-negative budget");
        let value = fill_ranks(inst, ranks.iter().copied(), t as f64);
        SeedingSolution {
            budget,
            seeds,
            second_stage_budget: t,
            allocation: ranks.into_iter().zip(q).collect(),
            value,
            split_values: Vec::new(),
        }
    }

    pub fn seed_ids(&self, inst: &Instance) -> Vec<usize> {
        self.seeds.iter().map(|&i| inst.core_ids()[i]).collect()
    }

    /// Allocation as a dense vector indexed by rank.
    pub fn dense_q(&self, neighbor_len: usize) -> Vec<f64> {
        let mut q = vec![0.0; neighbor_len];
        for &(r, x) in &self.allocation {
            q[r as usize] = x;
        }
        q
    }

    /// `Σ p_u q_u`.
    pub fn expected_second_stage_cost(&self, inst: &Instance) -> f64 {
        self.allocation
            .iter()
            .map(|&(r, q)| inst.probs()[r as usize] * q)
            .sum()
    }
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Picks the best split. Ties go to the smaller `t`.
fn best_split(inst: &Instance, k: usize, results: &[SplitResult]) -> SeedingSolution {
    let mut best: Option<SeedingSolution> = None;
    let mut split_values = Vec::with_capacity(results.len());
    for res in results {
        let candidate = SeedingSolution::from_seeds(inst, k, &res.seeds);
        split_values.push((res.second_stage_budget, candidate.value));
        if best.as_ref().is_none_or(|b| candidate.value > b.value) {
            best = Some(candidate);
        }
    }
    let mut sol = best.unwrap_or_else(|| SeedingSolution::empty(k));
    sol.split_values = split_values;
    sol
}

/// Budget-split greedy over the splits of `opts.strategy`, one split per
/// task on a pool of `opts.workers` threads. The result does not depend on
/// the worker count.
pub fn run(inst: &Instance, k: usize, opts: &GreedyOptions) -> SeedingSolution {
    if k < 2 {
        warn!("budget {k} leaves no room for both stages; returning the empty solution");
        return SeedingSolution::empty(k);
    }
    let splits = opts.strategy.splits(k);
    let results: Vec<SplitResult> = with_workers(opts.workers, || {
        splits
            .par_iter()
            .map(|&t| greedy_for_split(inst, t, k - t, opts.lazy))
            .collect()
    });
    best_split(inst, k, &results)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleAndPrune {
    pub epsilon: f64,
    /// Candidates sampled per round (ℓ).
    pub sample_size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SnpStats {
    /// Prune passes over the surviving universe, summed over splits.
    pub rounds: usize,
    pub max_sample: usize,
    /// Threshold levels scheduled, summed over splits.
    pub threshold_levels: usize,
}

/// Threshold greedy with sampling and pruning, executed as simulated rounds.
///
/// For each split the acceptance threshold starts just below `Δ_t`, the
/// largest singleton value, and decreases geometrically. Each round samples
/// up to `ℓ` surviving candidates, accepts those whose marginal clears the
/// threshold, then prunes every candidate that no longer does.
pub fn run_sample_and_prune(
    inst: &Instance,
    k: usize,
    params: &SampleAndPrune,
) -> Result<(SeedingSolution, SnpStats)> {
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(Error::param(format!(
            "epsilon {} outside (0,1)",
            params.epsilon
        )));
    }
    if params.sample_size == 0 {
        return Err(Error::param("sample size must be >= 1"));
    }
    let mut stats = SnpStats::default();
    if k < 2 {
        warn!("budget {k} leaves no room for both stages; returning the empty solution");
        return Ok((SeedingSolution::empty(k), stats));
    }
    let min_weight = inst
        .weights()
        .iter()
        .copied()
        .filter(|&w| w > 0.0)
        .min_by(f64::total_cmp);
    let mut results = Vec::with_capacity(k - 1);
    for t in 1..k {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(t as u64);
        let res = threshold_split(inst, t, k - t, params, min_weight, &mut rng, &mut stats);
        results.push(res);
    }
    Ok((best_split(inst, k, &results), stats))
}

/// Number of threshold levels for a split whose largest singleton value is `delta`.
pub fn threshold_levels(delta: f64, min_weight: Option<f64>, epsilon: f64) -> usize {
    let floor = min_weight.unwrap_or(0.0).max(delta * 1e-6);
    let ratio = delta / floor;
    ((ratio.ln() / (1.0 + epsilon).ln()).ceil() as usize).max(1)
}

fn threshold_split(
    inst: &Instance,
    t: usize,
    first_budget: usize,
    params: &SampleAndPrune,
    min_weight: Option<f64>,
    rng: &mut ChaCha8Rng,
    stats: &mut SnpStats,
) -> SplitResult {
    let m = inst.core_len();
    let mut state = SplitState::new(inst, t as f64);
    let mut evaluations = m;
    let delta = (0..m).map(|x| state.marginal(x)).fold(0.0, f64::max);
    if delta > 0.0 {
        let levels = threshold_levels(delta, min_weight, params.epsilon);
        stats.threshold_levels += levels;
        'levels: for i in 1..=levels {
            let tau = delta / (1.0 + params.epsilon).powi(i as i32);
            let mut universe: Vec<usize> = (0..m).filter(|&x| !state.contains(x)).collect();
            while !universe.is_empty() {
                let take = params.sample_size.min(universe.len());
                let mut sample: Vec<usize> = index::sample(rng, universe.len(), take)
                    .into_iter()
                    .map(|j| universe[j])
                    .collect();
                sample.sort_unstable();
                stats.max_sample = stats.max_sample.max(sample.len());
                for x in sample {
                    if state.len() >= first_budget {
                        break 'levels;
                    }
                    evaluations += 1;
                    if state.marginal(x) >= tau {
                        state.insert(x);
                    }
                }
                stats.rounds += 1;
                evaluations += universe.len();
                universe.retain(|&x| !state.contains(x) && state.marginal(x) >= tau);
            }
            if state.len() >= first_budget {
                break;
            }
        }
    }
    SplitResult {
        second_stage_budget: t,
        seeds: state.seeds.clone(),
        value: state.value,
        shortfall: first_budget - state.len(),
        evaluations,
    }
}
