//! Baselines, adaptive-value evaluators and the sampled-objective greedy.
//!
//! The adaptive value of a first-stage set `S` with second-stage budget `j`
//! is the expected total weight of the `j` heaviest realized neighbors of
//! `S`. Because ranks follow weight order, neighbor `i` is taken exactly when
//! it realizes and fewer than `j` lower-ranked neighbors do; the probability
//! of the latter is a Poisson-binomial prefix, computed by a small DP.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greedy::{fill_ranks, SeedingSolution, SplitStrategy};
use crate::instance::Instance;
use crate::knapsack::SortedItemList;

/// Largest neighborhood `adaptive_value_exact` accepts.
pub const EXACT_NEIGHBOR_CAP: usize = 5000;
/// Monte-Carlo draws per independently seeded chunk.
pub const MC_CHUNK: usize = 1024;

/// `k` core indices drawn uniformly without replacement, ascending.
pub fn baseline_rn(inst: &Instance, k: usize, seed: u64) -> Result<Vec<usize>> {
    let m = inst.core_len();
    if k > m {
        return Err(Error::param(format!("budget {k} exceeds core size {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, m, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// The `k` core members with the largest own weight (ties: lower index).
/// `core_weights` is indexed like `inst.core_ids()`.
pub fn baseline_im(core_weights: &[f64], k: usize) -> Result<Vec<usize>> {
    let m = core_weights.len();
    if k > m {
        return Err(Error::param(format!("budget {k} exceeds core size {m}")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| core_weights[b].total_cmp(&core_weights[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

/// Value of seeding core members directly: the sum of their own weights.
pub fn direct_value(core_weights: &[f64], set: &[usize]) -> f64 {
    set.iter().map(|&i| core_weights[i]).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomFriend {
    /// Core indices, ascending.
    pub first_stage: Vec<usize>,
    /// One neighbor rank per first-stage member that has any neighbors.
    pub friends: Vec<u32>,
    /// `Σ p_u w_u` over the distinct chosen friends.
    pub value: f64,
}

/// Random-friend baseline: `⌈k/2⌉` uniform core members, each contributing
/// one uniformly chosen neighbor.
pub fn baseline_rf(inst: &Instance, k: usize, seed: u64) -> Result<RandomFriend> {
    let half = k.div_ceil(2).min(inst.core_len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first_stage = index::sample(&mut rng, inst.core_len(), half).into_vec();
    first_stage.sort_unstable();
    let mut friends = Vec::with_capacity(half);
    for &i in &first_stage {
        let nbrs = inst.incidence(i);
        if !nbrs.is_empty() {
            friends.push(nbrs[rng.gen_range(0..nbrs.len())]);
        }
    }
    let mut distinct = friends.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let (w, p) = (inst.weights(), inst.probs());
    let value = distinct
        .iter()
        .map(|&r| p[r as usize] * w[r as usize])
        .sum();
    Ok(RandomFriend {
        first_stage,
        friends,
        value,
    })
}

/// Expected sum of the `j` heaviest realized items; `items` are `(weight,
/// probability)` pairs already in weight order.
pub fn top_j_expectation(items: &[(f64, f64)], j: usize) -> f64 {
    let j = j.min(items.len());
    if j == 0 {
        return 0.0;
    }
    // below[c] = P(exactly c of the items seen so far realized), c < j
    let mut below = vec![0.0; j];
    below[0] = 1.0;
    let mut value = 0.0;
    for &(w, p) in items {
        let admit: f64 = below.iter().sum();
        if admit <= 0.0 {
            break;
        }
        value += p * w * admit;
        for c in (0..j).rev() {
            let stay = below[c] * (1.0 - p);
            let from = if c > 0 { below[c - 1] * p } else { 0.0 };
            below[c] = stay + from;
        }
    }
    value
}

/// Exact adaptive value of `seeds` with second-stage budget `j`.
pub fn adaptive_value_exact(inst: &Instance, seeds: &[usize], j: usize) -> Result<f64> {
    let ranks = inst.neighborhood(seeds);
    if ranks.len() > EXACT_NEIGHBOR_CAP {
        return Err(Error::TooLarge {
            size: ranks.len(),
            cap: EXACT_NEIGHBOR_CAP,
        });
    }
    let (w, p) = (inst.weights(), inst.probs());
    let items: Vec<(f64, f64)> = ranks
        .iter()
        .map(|&r| (w[r as usize], p[r as usize]))
        .collect();
    Ok(top_j_expectation(&items, j))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Exact,
    MonteCarlo,
    Both,
}

impl EvalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EvalMethod::Exact => "exact",
            EvalMethod::MonteCarlo => "mc",
            EvalMethod::Both => "exact+mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveValueReport {
    pub exact: Option<f64>,
    pub mc: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: usize,
    pub method: EvalMethod,
}

/// Mean and standard error of a sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Runs `samples` draws in chunks of [`MC_CHUNK`]. Chunk `c` uses stream
/// `c` of the generator keyed by `seed`, so distinct seeds never share
/// draws. Per-chunk moments are merged in chunk order, which keeps the
/// result independent of the size of the rayon pool.
fn chunked_estimate<F>(samples: usize, seed: u64, draw: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);
    let n = total.count as f64;
    let var = if total.count > 1 {
        total.m2 / (n - 1.0)
    } else {
        0.0
    };
    Estimate {
        mean: total.mean,
        stderr: (var / n).sqrt(),
    }
}

/// Running count, mean and sum of squared deviations (Welford), mergeable
/// across chunks.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let (na, nb, n) = (self.count as f64, other.count as f64, count as f64);
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * nb / n,
            m2: self.m2 + other.m2 + d * d * na * nb / n,
        }
    }
}

/// Monte-Carlo adaptive value: realize `N(S)`, keep the `j` heaviest.
pub fn adaptive_value_mc(
    inst: &Instance,
    seeds: &[usize],
    j: usize,
    samples: usize,
    seed: u64,
) -> Result<AdaptiveValueReport> {
    if samples == 0 {
        return Err(Error::param("samples must be >= 1"));
    }
    let ranks = inst.neighborhood(seeds);
    let (w, p) = (inst.weights(), inst.probs());
    let est = chunked_estimate(samples, seed, |rng| {
        let mut taken = 0;
        let mut total = 0.0;
        for &r in &ranks {
            if taken == j {
                break;
            }
            let r = r as usize;
            if rng.gen::<f64>() < p[r] {
                taken += 1;
                total += w[r];
            }
        }
        total
    });
    Ok(AdaptiveValueReport {
        exact: None,
        mc: Some(est.mean),
        stderr: Some(est.stderr),
        samples,
        method: EvalMethod::MonteCarlo,
    })
}

/// Exact value when the neighborhood is small enough, Monte-Carlo when
/// `samples > 0`; at least one must be available.
pub fn evaluate_adaptive(
    inst: &Instance,
    seeds: &[usize],
    j: usize,
    samples: usize,
    seed: u64,
    exact: bool,
) -> Result<AdaptiveValueReport> {
    let exact_value = if exact {
        Some(adaptive_value_exact(inst, seeds, j)?)
    } else {
        None
    };
    let mut report = if samples > 0 {
        adaptive_value_mc(inst, seeds, j, samples, seed)?
    } else if exact_value.is_some() {
        AdaptiveValueReport {
            exact: None,
            mc: None,
            stderr: None,
            samples: 0,
            method: EvalMethod::Exact,
        }
    } else {
        return Err(Error::param(
            "request exact evaluation or at least one sample",
        ));
    };
    if let Some(v) = exact_value {
        report.exact = Some(v);
        if samples > 0 {
            report.method = EvalMethod::Both;
        }
    }
    Ok(report)
}

/// Sampled estimate of `F(p ⊗ q) = E[Σ_{u ∈ R} w_u]` where each neighbor is
/// in `R` independently with probability `p_u q_u`. Every draw walks the
/// whole vector, like a plain sample-average objective would.
pub fn estimate_f_sampling(
    inst: &Instance,
    q: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let n = inst.neighbor_len();
    if q.len() != n {
        return Err(Error::param(format!(
            "allocation has {} entries, expected {n}",
            q.len()
        )));
    }
    if let Some(x) = q.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::param(format!("allocation entry {x} outside [0,1]")));
    }
    if samples == 0 {
        return Err(Error::param("samples must be >= 1"));
    }
    let (w, p) = (inst.weights(), inst.probs());
    let pq: Vec<f64> = p.iter().zip(q).map(|(p, q)| p * q).collect();
    Ok(chunked_estimate(samples, seed, |rng| {
        let mut total = 0.0;
        for (r, &x) in pq.iter().enumerate() {
            if rng.gen::<f64>() < x {
                total += w[r];
            }
        }
        total
    }))
}

/// Sampled-objective value of a first-stage set: the knapsack allocation of
/// `budget` over `N(S)`, scored by [`estimate_f_sampling`].
fn saa_value(inst: &Instance, seeds: &[usize], budget: usize, samples: usize, seed: u64) -> f64 {
    let ranks = inst.neighborhood(seeds);
    let list: SortedItemList = inst.item_list(&ranks);
    let alloc = list.allocation(budget as f64).expect("non-negative budget");
    let mut q = vec![0.0; inst.neighbor_len()];
    for (&r, x) in ranks.iter().zip(alloc) {
        q[r as usize] = x;
    }
    estimate_f_sampling(inst, &q, samples, seed)
        .expect("valid allocation")
        .mean
}

/// Budget-split greedy whose marginals come from the sampled objective
/// instead of the exact oracle. Every evaluation reuses `seed`, so marginals
/// are common-random-number differences.
pub fn saa_greedy(
    inst: &Instance,
    k: usize,
    samples: usize,
    seed: u64,
    strategy: SplitStrategy,
) -> Result<SeedingSolution> {
    if samples == 0 {
        return Err(Error::param("samples must be >= 1"));
    }
    if k < 2 {
        return Ok(SeedingSolution::empty(k));
    }
    let m = inst.core_len();
    let mut best: Option<SeedingSolution> = None;
    let mut split_values = Vec::new();
    for t in strategy.splits(k) {
        let mut seeds: Vec<usize> = Vec::new();
        let mut current = 0.0;
        while seeds.len() < k - t {
            let mut pick: Option<(usize, f64)> = None;
            for x in 0..m {
                if seeds.contains(&x) {
                    continue;
                }
                seeds.push(x);
                let v = saa_value(inst, &seeds, t, samples, seed);
                seeds.pop();
                if pick.is_none_or(|(_, b)| v > b) {
                    pick = Some((x, v));
                }
            }
            match pick {
                Some((x, v)) if v > current => {
                    seeds.push(x);
                    current = v;
                }
                _ => break,
            }
        }
        let sol = SeedingSolution::from_seeds(inst, k, &seeds);
        split_values.push((t, sol.value));
        if best.as_ref().is_none_or(|b| sol.value > b.value) {
            best = Some(sol);
        }
    }
    let mut sol = best.unwrap_or_else(|| SeedingSolution::empty(k));
    sol.split_values = split_values;
    Ok(sol)
}

/// Largest core size the exhaustive optimizers accept.
pub const EXHAUSTIVE_CORE_CAP: usize = 20;

fn check_exhaustive(inst: &Instance) -> Result<()> {
    if inst.core_len() > EXHAUSTIVE_CORE_CAP {
        return Err(Error::TooLarge {
            size: inst.core_len(),
            cap: EXHAUSTIVE_CORE_CAP,
        });
    }
    Ok(())
}

fn members(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Best non-adaptive value over all first-stage sets with `|S| ≤ k`, each
/// completed by the optimal knapsack allocation of `k − |S|`. Returns the
/// value and the lexicographically first optimal mask's members.
pub fn opt_non_adaptive(inst: &Instance, k: usize) -> Result<(f64, Vec<usize>)> {
    check_exhaustive(inst)?;
    exhaustive(inst, k, |seeds, j| {
        Ok(fill_ranks(
            inst,
            inst.neighborhood(seeds).into_iter(),
            j as f64,
        ))
    })
}

/// Best adaptive value over all first-stage sets with `|S| ≤ k`.
pub fn opt_adaptive(inst: &Instance, k: usize) -> Result<(f64, Vec<usize>)> {
    check_exhaustive(inst)?;
    exhaustive(inst, k, |seeds, j| adaptive_value_exact(inst, seeds, j))
}

fn exhaustive<F>(inst: &Instance, k: usize, value: F) -> Result<(f64, Vec<usize>)>
where
    F: Fn(&[usize], usize) -> Result<f64>,
{
    let m = inst.core_len();
    let mut best = (0.0, Vec::new());
    for mask in 0u32..(1u32 << m) {
        let size = mask.count_ones() as usize;
        if size > k {
            continue;
        }
        let seeds = members(mask, m);
        let v = value(&seeds, k - size)?;
        if v > best.0 {
            best = (v, seeds);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub opt_adaptive: f64,
    pub adaptive_set: Vec<usize>,
    pub opt_non_adaptive: f64,
    pub non_adaptive_set: Vec<usize>,
}

pub const AUDIT_CORE_CAP: usize = 10;
pub const AUDIT_NEIGHBOR_CAP: usize = 12;

/// Computes both optima exhaustively and checks that the non-adaptive
/// relaxation dominates. Panics if it does not.
pub fn audit_adaptivity_gap(inst: &Instance, k: usize) -> Result<GapReport> {
    if inst.core_len() > AUDIT_CORE_CAP {
        return Err(Error::TooLarge {
            size: inst.core_len(),
            cap: AUDIT_CORE_CAP,
        });
    }
    if inst.neighbor_len() > AUDIT_NEIGHBOR_CAP {
        return Err(Error::TooLarge {
            size: inst.neighbor_len(),
            cap: AUDIT_NEIGHBOR_CAP,
        });
    }
    let (opt_adaptive, adaptive_set) = opt_adaptive(inst, k)?;
    let (opt_non_adaptive, non_adaptive_set) = opt_non_adaptive(inst, k)?;
    assert!(
        opt_adaptive <= opt_non_adaptive + 1e-9,
        "adaptive optimum {opt_adaptive} exceeds non-adaptive optimum {opt_non_adaptive}"
    );
    Ok(GapReport {
        opt_adaptive,
        adaptive_set,
        opt_non_adaptive,
        non_adaptive_set,
    })
}
