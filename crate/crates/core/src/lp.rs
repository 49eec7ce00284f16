//! LP relaxation of the non-adaptive problem and pipage rounding.
//!
//! Variables are `λ_v ∈ [0,1]` for each core node and `q_u ∈ [0,1]` for each
//! neighbor. The LP maximizes `Σ p_u q_u w_u` subject to one budget row
//! `Σ λ_v + Σ p_u q_u ≤ k` and one coverage row `q_u − Σ_{v ∋ u} λ_v ≤ 0`
//! per neighbor.

use std::io::Write;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::greedy::SeedingSolution;
use crate::instance::Instance;

/// Residual allowed on any row of a returned solution.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// One sparse `≤` row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedingLp {
    pub core_len: usize,
    pub neighbor_len: usize,
    pub budget: usize,
    /// Objective coefficient per column (zero on λ columns).
    pub objective: Vec<f64>,
    /// Row 0 is the budget row; row `1 + r` covers the neighbor of rank `r`.
    pub rows: Vec<Row>,
}

impl SeedingLp {
    pub fn column_count(&self) -> usize {
        self.core_len + self.neighbor_len
    }

    pub fn lambda_col(&self, v: usize) -> usize {
        v
    }

    pub fn q_col(&self, r: usize) -> usize {
        self.core_len + r
    }

    /// Writes `row col value` triples. Row 0 holds the objective, row 1 the
    /// budget constraint and rows `2..` the coverage constraints; every
    /// constraint is `≤` with the listed right-hand side.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "#adaptive-seed-lp v1")?;
        writeln!(
            out,
            "# maximize row 0; rows {} cols {} (lambda 0..{}, q {}..{})",
            self.rows.len() + 1,
            self.column_count(),
            self.core_len,
            self.core_len,
            self.column_count()
        )?;
        for (col, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                writeln!(out, "0 {col} {c:?}")?;
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            writeln!(out, "# rhs {} {:?}", i + 1, row.rhs)?;
            for &(col, a) in &row.terms {
                writeln!(out, "{} {col} {a:?}", i + 1)?;
            }
        }
        Ok(())
    }
}

pub fn build_lp(inst: &Instance, k: usize) -> SeedingLp {
    let m = inst.core_len();
    let n = inst.neighbor_len();
    let (w, p) = (inst.weights(), inst.probs());
    let mut objective = vec![0.0; m + n];
    for r in 0..n {
        objective[m + r] = p[r] * w[r];
    }
    let mut rows = Vec::with_capacity(n + 1);
    let mut budget_terms: Vec<(usize, f64)> = (0..m).map(|v| (v, 1.0)).collect();
    budget_terms.extend((0..n).map(|r| (m + r, p[r])));
    rows.push(Row {
        terms: budget_terms,
        rhs: k as f64,
    });
    for r in 0..n {
        let mut terms = vec![(m + r, 1.0)];
        terms.extend(inst.parents(r).iter().map(|&v| (v as usize, -1.0)));
        rows.push(Row { terms, rhs: 0.0 });
    }
    SeedingLp {
        core_len: m,
        neighbor_len: n,
        budget: k,
        objective,
        rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub lambda: Vec<f64>,
    /// Indexed by rank.
    pub q: Vec<f64>,
    pub objective: f64,
}

impl FractionalSolution {
    /// Largest constraint violation, including variable bounds.
    pub fn max_residual(&self, lp: &SeedingLp) -> f64 {
        let x: Vec<f64> = self.lambda.iter().chain(&self.q).copied().collect();
        let rows = lp.rows.iter().map(|row| {
            let lhs: f64 = row.terms.iter().map(|&(c, a)| a * x[c]).sum();
            (lhs - row.rhs).max(0.0)
        });
        let bounds = x.iter().map(|&v| (-v).max(v - 1.0).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

/// Solves the LP with a sparse revised simplex and audits the answer.
pub fn solve_lp(lp: &SeedingLp, tol: f64) -> Result<FractionalSolution> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = lp
        .objective
        .iter()
        .map(|&c| problem.add_var(c, (0.0, 1.0)))
        .collect();
    for row in &lp.rows {
        let expr: Vec<_> = row.terms.iter().map(|&(c, a)| (vars[c], a)).collect();
        problem.add_constraint(expr, ComparisonOp::Le, row.rhs);
    }
    let solution = problem.solve().map_err(|e| Error::Solver(e.to_string()))?;
    let value = |c: usize| solution[vars[c]].clamp(0.0, 1.0);
    let lambda: Vec<f64> = (0..lp.core_len).map(value).collect();
    let q: Vec<f64> = (0..lp.neighbor_len).map(|r| value(lp.q_col(r))).collect();
    let objective = q
        .iter()
        .enumerate()
        .map(|(r, &x)| lp.objective[lp.q_col(r)] * x)
        .sum();
    let frac = FractionalSolution {
        lambda,
        q,
        objective,
    };
    let residual = frac.max_residual(lp);
    if residual > tol.max(FEASIBILITY_TOL) {
        return Err(Error::Solver(format!(
            "solution violates a constraint by {residual:e}"
        )));
    }
    Ok(frac)
}

const INTEGRAL_EPS: f64 = 1e-9;

fn is_fractional(x: f64) -> bool {
    x > INTEGRAL_EPS && x < 1.0 - INTEGRAL_EPS
}

/// Weighted coverage surrogate restricted to the elements touched by core
/// nodes `i` and `j`: `Σ c_u (1 − Π_{v ∋ u} (1 − λ_v))`.
fn local_coverage(inst: &Instance, coeff: &[f64], lambda: &[f64], i: usize, j: usize) -> f64 {
    let mut total = 0.0;
    let mut visit = |r: u32| {
        let r = r as usize;
        if coeff[r] == 0.0 {
            return;
        }
        let miss: f64 = inst
            .parents(r)
            .iter()
            .map(|&v| 1.0 - lambda[v as usize])
            .product();
        total += coeff[r] * (1.0 - miss);
    };
    for &r in inst.incidence(i) {
        visit(r);
    }
    for &r in inst.incidence(j) {
        // shared elements were counted from i's side
        if inst.incidence(i).binary_search(&r).is_err() {
            visit(r);
        }
    }
    total
}

/// Sets produced by pipage rounding before the second stage is re-solved.
#[derive(Debug, Clone, PartialEq)]
pub struct PipageSets {
    /// Core indices with `λ = 1` once every pair has been resolved
    /// (the `⌊Σλ⌋` candidate).
    pub floor: Vec<usize>,
    /// `floor` plus the last fractional coordinate, when one remains.
    pub ceil: Option<Vec<usize>>,
}

/// Pipage rounding of `λ` on the weighted coverage instance whose elements
/// are the neighbors with `q_u > 0`, weighted by `p_u q_u w_u`. Pairs of
/// fractional coordinates are moved along `e_i − e_j` to whichever endpoint
/// has the larger coverage surrogate, lowest indices first, until at most
/// one fractional coordinate is left.
pub fn pipage_sets(inst: &Instance, frac: &FractionalSolution) -> PipageSets {
    let m = inst.core_len();
    let coeff = coverage_weights(inst, frac);
    let mut lambda: Vec<f64> = frac
        .lambda
        .iter()
        .map(|&x| {
            if x <= INTEGRAL_EPS {
                0.0
            } else if x >= 1.0 - INTEGRAL_EPS {
                1.0
            } else {
                x
            }
        })
        .collect();

    let mut fractional: Vec<usize> = (0..m).filter(|&v| is_fractional(lambda[v])).collect();
    while fractional.len() >= 2 {
        let (i, j) = (fractional[0], fractional[1]);
        let up = (1.0 - lambda[i]).min(lambda[j]);
        let down = lambda[i].min(1.0 - lambda[j]);
        let (li, lj) = (lambda[i], lambda[j]);

        lambda[i] = li + up;
        lambda[j] = lj - up;
        let gain_up = local_coverage(inst, &coeff, &lambda, i, j);
        lambda[i] = li - down;
        lambda[j] = lj + down;
        let gain_down = local_coverage(inst, &coeff, &lambda, i, j);

        if gain_up >= gain_down {
            lambda[i] = li + up;
            lambda[j] = lj - up;
        }
        for v in [i, j] {
            if !is_fractional(lambda[v]) {
                lambda[v] = lambda[v].round();
            }
        }
        fractional.retain(|&v| is_fractional(lambda[v]));
    }

    let floor: Vec<usize> = (0..m).filter(|&v| lambda[v] == 1.0).collect();
    let ceil = fractional.first().map(|&f| {
        let mut with = floor.clone();
        with.push(f);
        with.sort_unstable();
        with
    });
    PipageSets { floor, ceil }
}

fn coverage_weights(inst: &Instance, frac: &FractionalSolution) -> Vec<f64> {
    let (w, p) = (inst.weights(), inst.probs());
    (0..inst.neighbor_len())
        .map(|r| {
            if frac.q[r] > 0.0 {
                p[r] * frac.q[r] * w[r]
            } else {
                0.0
            }
        })
        .collect()
}

/// `Σ_{u ∈ N(S)} p_u q_u w_u` with the fractional `q` kept: the coverage of
/// `seeds` on the rounding instance.
pub fn coverage_value(inst: &Instance, frac: &FractionalSolution, seeds: &[usize]) -> f64 {
    let coeff = coverage_weights(inst, frac);
    inst.neighborhood(seeds)
        .iter()
        .map(|&r| coeff[r as usize])
        .sum()
}

/// Rounds with [`pipage_sets`], then re-solves the second stage exactly for
/// `k − |S|` on both the floor and the ceiling candidate and keeps the better.
pub fn pipage_round(inst: &Instance, frac: &FractionalSolution, k: usize) -> SeedingSolution {
    let sets = pipage_sets(inst, frac);
    let mut floor = sets.floor;
    // only reachable with an infeasible λ
    floor.truncate(k);
    let mut best = SeedingSolution::from_seeds(inst, k, &floor);
    if let Some(with) = sets.ceil.filter(|s| s.len() <= k) {
        let ceil = SeedingSolution::from_seeds(inst, k, &with);
        if ceil.value > best.value {
            best = ceil;
        }
    }
    best
}

/// Build, solve and round in one call.
pub fn run_lp(inst: &Instance, k: usize) -> Result<(SeedingSolution, FractionalSolution)> {
    let lp = build_lp(inst, k);
    let frac = solve_lp(&lp, FEASIBILITY_TOL)?;
    Ok((pipage_round(inst, &frac, k), frac))
}
