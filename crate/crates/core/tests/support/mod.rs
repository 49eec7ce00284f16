//! Brute-force reference implementations and random instance builders
//! shared by the integration tests. Nothing here calls the algorithm under
//! test except where noted.
#![allow(dead_code)]

use std::collections::BTreeSet;

use adaptive_seeding::knapsack::{Item, SortedItemList};
use adaptive_seeding::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FEAS_EPS: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random weight: small integers half of the time so ties occur.
pub fn random_weight(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(1..=5) as f64
    } else {
        rng.gen_range(0.0..10.0)
    }
}

/// A random probability, including the endpoints now and then.
pub fn random_prob(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 | 2 => 1.0,
        3 => 0.5,
        _ => rng.gen_range(0.01..1.0),
    }
}

pub fn random_items(rng: &mut ChaCha8Rng, n: usize) -> Vec<Item> {
    (0..n)
        .map(|i| Item::new(i, random_weight(rng), random_prob(rng)))
        .collect()
}

/// Random instance with exactly `m` core nodes (ids `0..m`) and `n`
/// neighbors (ids `100..100+n`), each neighbor adjacent to 1..=3 cores.
pub fn random_instance_sized(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Instance {
    let mut rows = Vec::new();
    for u in 0..n {
        let w = random_weight(rng);
        let p = random_prob(rng);
        let parents = rng.gen_range(1..=m.min(3));
        let mut chosen = BTreeSet::new();
        while chosen.len() < parents {
            chosen.insert(rng.gen_range(0..m));
        }
        for c in chosen {
            rows.push((c, 100 + u, w, p));
        }
    }
    let all: Vec<usize> = (0..m).collect();
    Instance::from_incidences(&rows, &all).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> Instance {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(1..=max_n);
    random_instance_sized(rng, m, n)
}

/// Fractional knapsack by enumerating the vertices of
/// `{q ∈ [0,1]^n : Σ p_i q_i ≤ b}`: every coordinate sits at 0 or 1 except
/// at most one, which the budget row then pins down.
pub fn knapsack_by_vertices(items: &[Item], budget: f64) -> f64 {
    let n = items.len();
    let mut best = 0.0f64;
    let mut state = vec![0u8; n]; // 0, 1, or 2 = free
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if free.len() <= 1 {
            let fixed_p: f64 = (0..n)
                .filter(|&i| state[i] == 1)
                .map(|i| items[i].prob)
                .sum();
            let fixed_v: f64 = (0..n)
                .filter(|&i| state[i] == 1)
                .map(|i| items[i].prob * items[i].weight)
                .sum();
            match free.first() {
                None => {
                    if fixed_p <= budget + FEAS_EPS {
                        best = best.max(fixed_v);
                    }
                }
                Some(&f) => {
                    let p = items[f].prob;
                    if p > 0.0 {
                        let q = (budget - fixed_p) / p;
                        if (-FEAS_EPS..=1.0 + FEAS_EPS).contains(&q) {
                            best = best.max(fixed_v + q.clamp(0.0, 1.0) * p * items[f].weight);
                        }
                    }
                }
            }
        }
        // next ternary vector
        let mut i = 0;
        while i < n && state[i] == 2 {
            state[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        state[i] += 1;
    }
    best
}

/// Ranks of `N(S)` computed from the instance's incidence lists.
pub fn neighborhood(inst: &Instance, seeds: &[usize]) -> Vec<u32> {
    let set: BTreeSet<u32> = seeds
        .iter()
        .flat_map(|&i| inst.incidence(i).iter().copied())
        .collect();
    set.into_iter().collect()
}

pub fn items_of(inst: &Instance, ranks: &[u32]) -> Vec<Item> {
    ranks.iter().map(|&r| inst.item(r as usize)).collect()
}

/// `O(N(S), b)` through the library's sorted list (checked separately
/// against `knapsack_by_vertices`).
pub fn oracle_value(inst: &Instance, seeds: &[usize], budget: f64) -> f64 {
    SortedItemList::new(items_of(inst, &neighborhood(inst, seeds)))
        .unwrap()
        .solve(budget)
        .unwrap()
}

/// Best non-adaptive value over every first-stage set with `|S| ≤ k`.
pub fn opt_non_adaptive(inst: &Instance, k: usize) -> f64 {
    let m = inst.core_len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size > k {
            continue;
        }
        let seeds: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        best = best.max(oracle_value(inst, &seeds, (k - size) as f64));
    }
    best
}

/// Expected sum of the `j` heaviest realized items, by enumerating all
/// `2^n` realizations. Ties in weight go to the smaller id.
pub fn top_j_by_enumeration(items: &[Item], j: usize) -> f64 {
    let n = items.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let mut prob = 1.0;
        let mut realized = Vec::new();
        for (i, it) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= it.prob;
                realized.push(*it);
            } else {
                prob *= 1.0 - it.prob;
            }
        }
        if prob == 0.0 {
            continue;
        }
        realized.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.id.cmp(&b.id)));
        let value: f64 = realized.iter().take(j).map(|it| it.weight).sum();
        total += prob * value;
    }
    total
}

/// Dense LP `max cᵀx` over `{A x ≤ b, 0 ≤ x ≤ 1}` solved by enumerating
/// every vertex: choose the tight rows `T` and an equally sized set `B` of
/// free variables, fix the rest at 0 or 1, solve `A[T,B] x_B = b_T − …`
/// and keep the best feasible point.
pub fn lp_by_vertices(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    let d = c.len();
    let r = a.len();
    let mut best = f64::NEG_INFINITY;
    for tmask in 0u32..(1 << r) {
        let tight: Vec<usize> = (0..r).filter(|&i| tmask >> i & 1 == 1).collect();
        let s = tight.len();
        if s > d {
            continue;
        }
        for basis in combinations(d, s) {
            let sub: Vec<Vec<f64>> = tight
                .iter()
                .map(|&i| basis.iter().map(|&j| a[i][j]).collect())
                .collect();
            let Some(inv) = invert(&sub) else { continue };
            let nonbasic: Vec<usize> = (0..d).filter(|j| !basis.contains(j)).collect();
            for fix in 0u32..(1 << nonbasic.len()) {
                let mut x = vec![0.0; d];
                for (t, &j) in nonbasic.iter().enumerate() {
                    x[j] = (fix >> t & 1) as f64;
                }
                let rhs: Vec<f64> = tight
                    .iter()
                    .map(|&i| b[i] - nonbasic.iter().map(|&j| a[i][j] * x[j]).sum::<f64>())
                    .collect();
                for (row, &j) in basis.iter().enumerate() {
                    x[j] = (0..s).map(|t| inv[row][t] * rhs[t]).sum();
                }
                if x.iter()
                    .any(|&v| !(-FEAS_EPS..=1.0 + FEAS_EPS).contains(&v))
                {
                    continue;
                }
                let feasible =
                    (0..r).all(|i| (0..d).map(|j| a[i][j] * x[j]).sum::<f64>() <= b[i] + 1e-8);
                if feasible {
                    best = best.max((0..d).map(|j| c[j] * x[j]).sum());
                }
            }
        }
    }
    best
}

/// Dense LP `max cᵀx` over `{A x ≤ b, 0 ≤ x ≤ 1}` with `b ≥ 0`, solved by
/// a textbook tableau simplex under Bland's rule (so degenerate pivots
/// cannot cycle). The origin is feasible, so no first phase is needed.
pub fn lp_by_simplex(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    const EPS: f64 = 1e-11;
    let d = c.len();
    let rows = a.len() + d;
    let width = d + rows + 1;
    let mut t = vec![vec![0.0; width]; rows];
    for i in 0..rows {
        if i < a.len() {
            t[i][..d].copy_from_slice(&a[i]);
            t[i][width - 1] = b[i];
        } else {
            t[i][i - a.len()] = 1.0;
            t[i][width - 1] = 1.0;
        }
        t[i][d + i] = 1.0;
    }
    let mut basis: Vec<usize> = (d..d + rows).collect();
    let mut reduced: Vec<f64> = c
        .iter()
        .copied()
        .chain(std::iter::repeat_n(0.0, rows))
        .collect();
    let mut value = 0.0;
    while let Some(enter) = (0..d + rows).find(|&j| reduced[j] > EPS) {
        let leave = (0..rows)
            .filter(|&i| t[i][enter] > EPS)
            .map(|i| (t[i][width - 1] / t[i][enter], basis[i], i))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
            .map(|x| x.2)
            .expect("bounded by the box constraints");
        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        let prow = t[leave].clone();
        for (i, row) in t.iter_mut().enumerate() {
            let f = row[enter];
            if i != leave && f != 0.0 {
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= f * p;
                }
            }
        }
        let f = reduced[enter];
        for (x, p) in reduced.iter_mut().zip(&prow) {
            *x -= f * p;
        }
        value += f * prow[width - 1];
        basis[leave] = enter;
    }
    value
}

/// The seeding LP as dense `(c, A, b)`, written out from the instance
/// independently of the library's builder.
pub fn seeding_lp_dense(inst: &Instance, k: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let (m, n) = (inst.core_len(), inst.neighbor_len());
    let d = m + n;
    let mut c = vec![0.0; d];
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut budget = vec![1.0; d];
    for r in 0..n {
        let it = inst.item(r);
        c[m + r] = it.prob * it.weight;
        budget[m + r] = it.prob;
    }
    a.push(budget);
    b.push(k as f64);
    for r in 0..n {
        let mut row = vec![0.0; d];
        row[m + r] = 1.0;
        for &v in inst.parents(r) {
            row[v as usize] = -1.0;
        }
        a.push(row);
        b.push(0.0);
    }
    (c, a, b)
}

pub fn seeding_lp_by_simplex(inst: &Instance, k: usize) -> f64 {
    let (c, a, b) = seeding_lp_dense(inst, k);
    lp_by_simplex(&c, &a, &b)
}

/// The seeding LP written out densely from the instance, independent of
/// the library's builder.
pub fn seeding_lp_by_vertices(inst: &Instance, k: usize) -> f64 {
    let (m, n) = (inst.core_len(), inst.neighbor_len());
    let d = m + n;
    let mut c = vec![0.0; d];
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut budget = vec![0.0; d];
    budget[..m].fill(1.0);
    for r in 0..n {
        let it = inst.item(r);
        c[m + r] = it.prob * it.weight;
        budget[m + r] = it.prob;
    }
    a.push(budget);
    b.push(k as f64);
    for r in 0..n {
        let mut row = vec![0.0; d];
        row[m + r] = 1.0;
        for (v, x) in row.iter_mut().enumerate().take(m) {
            if inst.incidence(v).contains(&(r as u32)) {
                *x = -1.0;
            }
        }
        a.push(row);
        b.push(0.0);
    }
    lp_by_vertices(&c, &a, &b)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    let pivot = m[col].clone();
                    for (x, p) in m[row].iter_mut().zip(&pivot) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}
