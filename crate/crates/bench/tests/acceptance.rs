//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdicts are always printed; exits non-zero when any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use adaptive_seeding::evaluation::{
    adaptive_value_exact, adaptive_value_mc, opt_adaptive, opt_non_adaptive as library_opt_na,
};
use adaptive_seeding::generators::{barabasi_albert, watts_strogatz, GeneratorSpec};
use adaptive_seeding::greedy::{run, run_sample_and_prune, GreedyOptions, SampleAndPrune};
use adaptive_seeding::influence::voter_weights;
use adaptive_seeding::knapsack::{merged_solve, Item, SortedItemList};
use adaptive_seeding::lp::{build_lp, run_lp, solve_lp, FEASIBILITY_TOL};
use adaptive_seeding_bench::{run_experiment, run_scaling, ExperimentConfig, ResultRow};
use rand::seq::SliceRandom;
use rand::Rng;
use support::{
    items_of, knapsack_by_vertices, neighborhood, opt_non_adaptive, oracle_value, random_instance,
    random_items, rng, seeding_lp_by_simplex, seeding_lp_by_vertices, top_j_by_enumeration,
};

const FACTOR: f64 = 1.0 - 1.0 / std::f64::consts::E;
const TOL: f64 = 1e-9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adseed-acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Mean value per `(budget, algo)` over repetitions.
fn means(rows: &[ResultRow]) -> BTreeMap<(usize, String), f64> {
    let mut acc: BTreeMap<(usize, String), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.budget, r.algo.clone())).or_default();
        e.0 += r.value;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (s, c))| (k, s / c as f64))
        .collect()
}

fn knapsack_oracle() -> Verdict {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = r.gen_range(0..=6);
        let items = random_items(&mut r, n);
        let budget = r.gen_range(0.0..4.0);
        let want = knapsack_by_vertices(&items, budget);
        let got = SortedItemList::new(items.clone())
            .unwrap()
            .solve(budget)
            .unwrap();
        let (a, b): (Vec<Item>, Vec<Item>) = items.iter().partition(|_| r.gen_bool(0.5));
        let merged = merged_solve(
            &SortedItemList::new(a).unwrap(),
            &SortedItemList::new(b).unwrap(),
            budget,
        )
        .unwrap();
        worst = worst.max((got - want).abs()).max((merged - want).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= TOL && elapsed < Duration::from_secs(1),
        format!("200 instances, max |error| {worst:.1e}, {}", secs(elapsed)),
    )
}

fn value(items: &[Item], b: f64) -> f64 {
    SortedItemList::new(items.to_vec())
        .unwrap()
        .solve(b)
        .unwrap()
}

fn plus(items: &[Item], extra: &[Item]) -> Vec<Item> {
    [items, extra].concat()
}

fn property_suites() -> Verdict {
    let start = Instant::now();
    let mut r = rng(1002);
    let (mut v1, mut v2, mut v3) = (0, 0, 0);
    for _ in 0..100 {
        // marginal of an item is non-decreasing in the budget
        let n = r.gen_range(1..=12);
        let mut items = random_items(&mut r, n);
        let x = items.pop().unwrap();
        let t: Vec<Item> = items.into_iter().filter(|_| r.gen_bool(0.7)).collect();
        let b = r.gen_range(0.0..6.0);
        let c = b + r.gen_range(0.0..6.0);
        let gain = |budget| value(&plus(&t, &[x]), budget) - value(&t, budget);
        if gain(c) < gain(b) - TOL {
            v1 += 1;
        }
    }
    for _ in 0..100 {
        // the oracle is submodular in its item set
        let n = r.gen_range(2..=12);
        let mut items = random_items(&mut r, n);
        items.shuffle(&mut r);
        let (x, y) = (items.pop().unwrap(), items.pop().unwrap());
        let t: Vec<Item> = items.into_iter().filter(|_| r.gen_bool(0.6)).collect();
        let b = r.gen_range(0.0..6.0);
        let lhs = value(&plus(&t, &[x]), b) - value(&t, b);
        let rhs = value(&plus(&t, &[x, y]), b) - value(&plus(&t, &[y]), b);
        if lhs < rhs - TOL {
            v2 += 1;
        }
    }
    for _ in 0..100 {
        // composition with the neighborhood map is monotone and submodular
        let inst = random_instance(&mut r, 8, 12);
        let m = inst.core_len();
        let b = r.gen_range(0.0..6.0);
        let big: Vec<usize> = (0..m).filter(|_| r.gen_bool(0.5)).collect();
        let small: Vec<usize> = big.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
        let f = |s: &[usize]| oracle_value(&inst, s, b);
        if f(&small) > f(&big) + TOL {
            v3 += 1;
        }
        for x in (0..m).filter(|x| !big.contains(x)) {
            let gs = f(&[small.as_slice(), &[x]].concat()) - f(&small);
            let gb = f(&[big.as_slice(), &[x]].concat()) - f(&big);
            if gs < gb - TOL {
                v3 += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        v1 + v2 + v3 == 0 && elapsed < Duration::from_secs(10),
        format!(
            "violations: budget-marginal {v1}, item-submodularity {v2}, first-stage {v3}; {}",
            secs(elapsed)
        ),
    )
}

fn greedy_guarantee() -> Verdict {
    let mut r = rng(1003);
    let (mut bad, mut worst) = (0, f64::INFINITY);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 8, 12);
        let k = r.gen_range(2..=inst.core_len() + 3);
        let opt = opt_non_adaptive(&inst, k);
        assert!((library_opt_na(&inst, k).unwrap().0 - opt).abs() <= TOL);
        let sol = run(&inst, k, &GreedyOptions::default());
        if sol.value < FACTOR * opt - TOL {
            bad += 1;
        }
        if opt > 0.0 {
            worst = worst.min(sol.value / opt);
        }
    }
    verdict(
        bad == 0,
        format!("50 instances, {bad} violations, worst greedy/OPT {worst:.4}"),
    )
}

fn adaptivity_gap() -> Verdict {
    let mut r = rng(1004);
    let mut bad = 0;
    for _ in 0..50 {
        let inst = random_instance(&mut r, 6, 12);
        let k = r.gen_range(1..=inst.core_len() + 3);
        let (opt_a, _) = opt_adaptive(&inst, k).unwrap();
        // the exact evaluator's optimum against realization enumeration
        let m = inst.core_len();
        let enumerated = (0u32..1 << m)
            .filter(|mask| mask.count_ones() as usize <= k)
            .map(|mask| {
                let seeds: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                top_j_by_enumeration(
                    &items_of(&inst, &neighborhood(&inst, &seeds)),
                    k - seeds.len(),
                )
            })
            .fold(0.0f64, f64::max);
        assert!((opt_a - enumerated).abs() <= TOL);
        if opt_a > opt_non_adaptive(&inst, k) + TOL {
            bad += 1;
        }
    }
    verdict(
        bad == 0,
        format!("50 audited instances, {bad} with OPT_A > OPT_NA"),
    )
}

fn lp_rounding() -> Verdict {
    let mut r = rng(1005);
    let mut lp_err = 0.0f64;
    for i in 0..100 {
        let inst = if i < 20 {
            random_instance(&mut r, 4, 5)
        } else {
            random_instance(&mut r, 6, 8)
        };
        let k = r.gen_range(0..=inst.core_len() + 2);
        let frac = solve_lp(&build_lp(&inst, k), FEASIBILITY_TOL).unwrap();
        let want = if i < 20 {
            seeding_lp_by_vertices(&inst, k)
        } else {
            seeding_lp_by_simplex(&inst, k)
        };
        lp_err = lp_err.max((frac.objective - want).abs());
    }
    let (mut bad, mut worst) = (0, f64::INFINITY);
    for _ in 0..100 {
        let inst = random_instance(&mut r, 8, 12);
        let k = r.gen_range(2..=inst.core_len() + 3);
        let (sol, frac) = run_lp(&inst, k).unwrap();
        if sol.value < FACTOR * frac.objective - TOL {
            bad += 1;
        }
        if frac.objective > 0.0 {
            worst = worst.min(sol.value / frac.objective);
        }
    }
    verdict(
        lp_err <= 1e-6 && bad == 0,
        format!("LP vs oracles max |error| {lp_err:.1e}; rounding: {bad} violations on 100, worst ratio {worst:.4}"),
    )
}

fn sample_and_prune() -> Verdict {
    let mut r = rng(1006);
    let (mut bad, mut worst) = (0, f64::INFINITY);
    for i in 0..50 {
        let inst = random_instance(&mut r, 8, 12);
        let k = r.gen_range(2..=inst.core_len() + 3);
        let params = SampleAndPrune {
            epsilon: 0.1,
            sample_size: r.gen_range(1..=inst.core_len()),
            seed: i,
        };
        let (sol, _) = run_sample_and_prune(&inst, k, &params).unwrap();
        let opt = opt_non_adaptive(&inst, k);
        if sol.value < (FACTOR - 0.1) * opt - TOL {
            bad += 1;
        }
        if opt > 0.0 {
            worst = worst.min(sol.value / opt);
        }
    }
    verdict(
        bad == 0,
        format!("50 instances, {bad} violations, worst value/OPT {worst:.4}"),
    )
}

fn voter_model() -> Verdict {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let g = match i % 3 {
            0 => barabasi_albert(300 + 50 * i as usize, 3, 3, i).unwrap(),
            1 => watts_strogatz(400 + 20 * i as usize, 6, 0.2, i).unwrap(),
            _ => GeneratorSpec::Configuration {
                n: 500,
                exponent: 2.3,
                min_degree: 2,
                max_degree: 60,
            }
            .generate(i)
            .unwrap(),
        };
        let n = g.node_count() as f64;
        for t in 0..=100 {
            let total: f64 = voter_weights(&g, t).values.iter().sum();
            worst = worst.max((total - n).abs() / n);
        }
    }
    let base = "\
experiment = voter
input = ba:n=10000,m0=10,attach=10
core = random:200
prob_mean = 0.5
budget = 100
algo = greedy
evaluation = auto:10000
seed = 3
";
    let at = |t: usize| {
        let cfg = ExperimentConfig::parse(&format!("{base}weights = voter:{t}\n")).unwrap();
        run_experiment(&cfg, &scratch(&format!("voter-{t}"))).unwrap()[0].value
    };
    let (v15, v50) = (at(15), at(50));
    let rel = (v15 - v50).abs() / v50;
    verdict(
        worst <= 1e-6 && rel <= 0.05,
        format!("max mass drift {worst:.1e}·n over 20 graphs; value t=15 {v15:.1}, t=50 {v50:.1}, gap {:.2}%", rel * 100.0),
    )
}

fn adaptive_over_im(input: &str) -> (f64, f64, f64) {
    let text = format!(
        "experiment = reproduction\ninput = {input}\ncore = random:1000\nweights = degree\nprob_mean = 1.0\n\
         budget_fraction = 0.1\nalgo = greedy\nalgo = im\nevaluation = auto:1000\nseed = 1\n"
    );
    let cfg = ExperimentConfig::parse(&text).unwrap();
    let rows = run_experiment(&cfg, &scratch("reproduction")).unwrap();
    let (a, im) = (rows[0].value, rows[1].value);
    (a / im, a, im)
}

fn performance_reproduction() -> Verdict {
    let start = Instant::now();
    let (ba, ba_a, ba_im) = adaptive_over_im("ba:n=100000,m0=10,attach=10");
    let (ws, ws_a, ws_im) = adaptive_over_im("ws:n=100000,ring_degree=20,beta=0.1");
    let elapsed = start.elapsed();
    verdict(
        ba >= 5.0 && ws <= ba / 2.0 && elapsed < Duration::from_secs(300),
        format!(
            "BA adaptive/IM {ba:.2} ({ba_a:.0}/{ba_im:.0}), WS {ws:.2} ({ws_a:.0}/{ws_im:.0}), {}",
            secs(elapsed)
        ),
    )
}

fn benchmark_ordering() -> Verdict {
    let text = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/pages_like.conf"
    ))
    .unwrap();
    let cfg = ExperimentConfig::parse(&text).unwrap();
    let rows = run_experiment(&cfg, &scratch("ordering")).unwrap();
    let mean = means(&rows);
    let budgets: Vec<usize> = mean
        .keys()
        .map(|(b, _)| *b)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for b in budgets {
        let get = |a: &str| mean[&(b, a.to_string())];
        let (ad, rf, im, rn) = (get("greedy"), get("rf"), get("im"), get("rn"));
        ok &= ad >= rf && rf >= im && im >= rn;
        parts.push(format!("k={b}: {ad:.0}/{rf:.0}/{im:.0}/{rn:.0}"));
    }
    verdict(
        ok,
        format!(
            "adaptive/RF/IM/RN means over 10 seeds, {}",
            parts.join(", ")
        ),
    )
}

fn saa_gap() -> Verdict {
    let text = "\
experiment = saa
input = ba:n=50000,m0=50,attach=50
core = random:5000
prob_mean = 0.5
budget = 3
algo = greedy
algo = saa-greedy
ladder = 1000
ladder = 4000
timing_repeats = 3
seed = 1
";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let rows = run_scaling(&cfg, &scratch("saa")).unwrap();
    let speedup = |i: usize| rows[i + 1].time_ms / rows[i].time_ms;
    let (small, large) = (speedup(0), speedup(2));
    verdict(
        large >= 50.0 && large > small,
        format!(
            "speedup {small:.0}x at {} neighbors, {large:.0}x at {} neighbors",
            rows[0].neighbors, rows[2].neighbors
        ),
    )
}

fn evaluator() -> Verdict {
    let mut r = rng(1011);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let inst = random_instance(&mut r, 5, 12);
        let seeds: Vec<usize> = (0..inst.core_len()).filter(|_| r.gen_bool(0.6)).collect();
        let j = r.gen_range(0..=6);
        let want = top_j_by_enumeration(&items_of(&inst, &neighborhood(&inst, &seeds)), j);
        worst = worst.max((adaptive_value_exact(&inst, &seeds, j).unwrap() - want).abs());
    }
    let mut hits = 0;
    for trial in 0..100 {
        let inst = random_instance(&mut r, 5, 12);
        let seeds: Vec<usize> = (0..inst.core_len()).collect();
        let j = r.gen_range(1..=5);
        let exact = adaptive_value_exact(&inst, &seeds, j).unwrap();
        let rep = adaptive_value_mc(&inst, &seeds, j, 4000, 5000 + trial).unwrap();
        if (rep.mc.unwrap() - exact).abs() <= 3.0 * rep.stderr.unwrap() + 1e-12 {
            hits += 1;
        }
    }
    verdict(
        worst <= TOL && hits >= 99,
        format!(
            "exact vs enumeration max |error| {worst:.1e} on 200; MC within 3 SE in {hits}/100"
        ),
    )
}

fn determinism() -> Verdict {
    let base = "\
experiment = determinism
input = ba:n=3000,m0=5,attach=5
core = random:150
prob_family = beta
prob_mean = 0.3
budget = 6
budget = 12
algo = greedy
algo = greedy-geo
algo = snp:0.2:10
algo = lp
algo = saa-greedy:200
algo = rn
algo = im
algo = rf
evaluation = mc:3000
repetitions = 2
seed = 5
";
    let mut outputs = Vec::new();
    for workers in [1, 8, 1, 8] {
        let cfg = ExperimentConfig::parse(&format!("{base}workers = {workers}\n")).unwrap();
        let dir = scratch(&format!("det-{}", outputs.len()));
        run_experiment(&cfg, &dir).unwrap();
        outputs.push((
            fs::read(dir.join("results.csv")).unwrap(),
            fs::read(dir.join("figure-determinism.svg")).unwrap(),
        ));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        same,
        format!(
            "4 runs (workers 1, 8, 1, 8), {} CSV bytes each, identical: {same}",
            outputs[0].0.len()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "knapsack oracle", knapsack_oracle),
        (2, "oracle property suites", property_suites),
        (3, "greedy guarantee", greedy_guarantee),
        (4, "adaptivity gap", adaptivity_gap),
        (5, "LP and pipage rounding", lp_rounding),
        (6, "sample and prune", sample_and_prune),
        (7, "voter model", voter_model),
        (8, "performance reproduction", performance_reproduction),
        (9, "benchmark ordering", benchmark_ordering),
        (10, "SAA gap", saa_gap),
        (11, "evaluator", evaluator),
        (12, "determinism", determinism),
    ];
    // `cargo test -- <filter>` style selection by criterion number
    let wanted: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {tag} {name}: {} [{}]",
            v.detail,
            secs(start.elapsed())
        );
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
