//! Running configured experiments and scaling ladders.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use adaptive_seeding::evaluation::{
    adaptive_value_exact, adaptive_value_mc, baseline_im, baseline_rf, baseline_rn, direct_value,
    saa_greedy, EXACT_NEIGHBOR_CAP,
};
use adaptive_seeding::graph::load_edge_list;
use adaptive_seeding::greedy::{run, run_sample_and_prune};
use adaptive_seeding::influence::{
    assign_probabilities, degree_weights, voter_weights, ProbabilityModel,
};
use adaptive_seeding::lp::run_lp;
use adaptive_seeding::{
    build_instance, BuildOptions, Graph, GreedyOptions, Instance, SampleAndPrune, SeedingSolution,
    SplitStrategy,
};
use rand::seq::{index, SliceRandom};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{
    Algo, Amount, CorePool, CoreSpec, Evaluation, ExperimentConfig, InputSpec, WeightModel,
};
use crate::error::{BenchError, Result};
use crate::svg;

pub const CSV_HEADER: &str = "experiment,algo,budget,value,stderr,time_ms,seed";
pub const TIMING_HEADER: &str = "experiment,algo,neighbors,core,budget,time_ms,value";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub algo: String,
    pub budget: usize,
    pub value: f64,
    pub stderr: f64,
    pub time_ms: Option<f64>,
    /// Budget splits the algorithm tried (0 for single-stage baselines).
    pub splits: usize,
    pub seed: u64,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        let time = self.time_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.experiment, self.algo, self.budget, self.value, self.stderr, time, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub experiment: String,
    pub algo: String,
    pub neighbors: usize,
    pub core: usize,
    pub budget: usize,
    pub time_ms: f64,
    pub value: f64,
}

impl TimingRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{}",
            self.experiment,
            self.algo,
            self.neighbors,
            self.core,
            self.budget,
            self.time_ms,
            self.value
        )
    }
}

fn open_input(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|source| BenchError::Input {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_graph(input: &InputSpec, graph_seed: u64) -> Result<Graph> {
    match input {
        InputSpec::File(path) => Ok(load_edge_list(BufReader::new(open_input(path)?))?),
        InputSpec::Generator(spec) => Ok(spec.generate(graph_seed)?),
    }
}

pub fn node_weights(g: &Graph, model: WeightModel) -> Vec<f64> {
    match model {
        WeightModel::Degree => degree_weights(g).values,
        WeightModel::Voter(t) => voter_weights(g, t).values,
    }
}

fn read_core_file(path: &Path, g: &Graph) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Input {
        path: path.display().to_string(),
        source,
    })?;
    let mut core = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let id: u64 = t.parse().map_err(|_| {
            BenchError::Invalid(format!(
                "{}: line {}: expected a node id, got `{t}`",
                path.display(),
                i + 1
            ))
        })?;
        let idx = g.original_ids().binary_search(&id).map_err(|_| {
            BenchError::Invalid(format!("{}: node {id} is not in the graph", path.display()))
        })?;
        core.push(idx);
    }
    Ok(core)
}

/// Node indices of the core set. Random cores are drawn without
/// replacement from the configured pool.
pub fn select_core(g: &Graph, spec: &CoreSpec, seed: u64) -> Result<Vec<usize>> {
    match spec {
        CoreSpec::File(path) => read_core_file(path, g),
        CoreSpec::Random { amount, pool } => {
            let candidates: Vec<usize> = match pool {
                CorePool::All => (0..g.node_count()).collect(),
                CorePool::LowDegree => {
                    let mut degrees = g.degrees();
                    degrees.sort_unstable();
                    let median = degrees.get(degrees.len() / 2).copied().unwrap_or(0);
                    (0..g.node_count())
                        .filter(|&v| g.degree(v) <= median)
                        .collect()
                }
            };
            let size = match *amount {
                Amount::Count(c) => c,
                Amount::Fraction(f) => (f * candidates.len() as f64).round() as usize,
            };
            if size == 0 || size > candidates.len() {
                return Err(BenchError::Invalid(format!(
                    "core size {size} not in 1..={} for this graph",
                    candidates.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = index::sample(&mut rng, candidates.len(), size)
                .into_iter()
                .map(|i| candidates[i])
                .collect();
            picked.sort_unstable();
            Ok(picked)
        }
    }
}

/// What a derived seed is used for within one repetition.
#[derive(Debug, Clone, Copy)]
pub enum Purpose {
    Core = 0,
    Probabilities = 1,
    Algorithm = 2,
    Evaluation = 3,
    Subsample = 4,
}

/// Independent seed for one purpose within a repetition: the first word of
/// stream `purpose` of the generator keyed by `seed`.
pub fn derive_seed(seed: u64, purpose: Purpose) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng.next_u64()
}

/// Instance for the repetition with seed `seed`.
pub fn make_instance(
    cfg: &ExperimentConfig,
    g: &Graph,
    weights: &[f64],
    seed: u64,
) -> Result<Instance> {
    let (core, probs) = (
        derive_seed(seed, Purpose::Core),
        derive_seed(seed, Purpose::Probabilities),
    );
    make_instance_seeded(cfg, g, weights, core, probs)
}

pub fn make_instance_seeded(
    cfg: &ExperimentConfig,
    g: &Graph,
    weights: &[f64],
    core_seed: u64,
    prob_seed: u64,
) -> Result<Instance> {
    let core = select_core(g, &cfg.core, core_seed)?;
    let ones = vec![1.0; g.node_count()];
    let opts = BuildOptions {
        exclude_core_from_neighbors: cfg.exclude_core_from_neighbors,
    };
    let mut inst = build_instance(g, &core, weights, &ones, opts)?;
    let model = ProbabilityModel {
        family: cfg.prob_family,
        mean: cfg.prob_mean,
        seed: prob_seed,
    };
    assign_probabilities(&mut inst, &model)?;
    Ok(inst)
}

fn resolve_budgets(cfg: &ExperimentConfig, m: usize) -> Vec<usize> {
    let mut out = cfg.budgets.clone();
    out.extend(
        cfg.budget_fractions
            .iter()
            .map(|f| ((f * m as f64).round() as usize).max(1)),
    );
    out
}

fn check_budgets(cfg: &ExperimentConfig, budgets: &[usize], m: usize) -> Result<()> {
    for &k in budgets {
        for a in &cfg.algos {
            if a.two_stage() && k < 2 {
                return Err(BenchError::Invalid(format!("budget {k} too small for {a}")));
            }
            if matches!(a, Algo::Rn | Algo::Im) && k > m {
                return Err(BenchError::Invalid(format!(
                    "budget {k} exceeds core size {m} for {a}"
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of one algorithm run before evaluation.
enum Outcome {
    TwoStage(SeedingSolution),
    Direct { value: f64 },
}

fn greedy_options(cfg: &ExperimentConfig, strategy: SplitStrategy) -> GreedyOptions {
    GreedyOptions {
        strategy,
        workers: cfg.workers,
        lazy: cfg.lazy,
    }
}

fn run_algo(
    cfg: &ExperimentConfig,
    inst: &Instance,
    core_w: &[f64],
    algo: Algo,
    k: usize,
    seed: u64,
) -> Result<Outcome> {
    Ok(match algo {
        Algo::Greedy => Outcome::TwoStage(run(inst, k, &greedy_options(cfg, SplitStrategy::All))),
        Algo::GreedyGeo { epsilon } => Outcome::TwoStage(run(
            inst,
            k,
            &greedy_options(cfg, SplitStrategy::Geometric { epsilon }),
        )),
        Algo::Snp {
            epsilon,
            sample_size,
        } => {
            let params = SampleAndPrune {
                epsilon,
                sample_size,
                seed,
            };
            Outcome::TwoStage(run_sample_and_prune(inst, k, &params)?.0)
        }
        Algo::Lp => Outcome::TwoStage(run_lp(inst, k)?.0),
        Algo::SaaGreedy { samples } => {
            let samples = samples.unwrap_or(inst.neighbor_len()).max(1);
            Outcome::TwoStage(saa_greedy(inst, k, samples, seed, SplitStrategy::All)?)
        }
        Algo::Rn => Outcome::Direct {
            value: direct_value(core_w, &baseline_rn(inst, k, seed)?),
        },
        Algo::Im => Outcome::Direct {
            value: direct_value(core_w, &baseline_im(core_w, k)?),
        },
        Algo::Rf => Outcome::Direct {
            value: baseline_rf(inst, k, seed)?.value,
        },
    })
}

/// Runs a two-stage algorithm on its own, outside any config.
pub fn run_single(
    inst: &Instance,
    algo: Algo,
    k: usize,
    workers: usize,
    lazy: bool,
    seed: u64,
) -> Result<SeedingSolution> {
    if !algo.two_stage() {
        return Err(BenchError::Invalid(format!(
            "`{algo}` is not a two-stage algorithm"
        )));
    }
    let cfg = ExperimentConfig {
        workers,
        lazy,
        ..ExperimentConfig::default()
    };
    cfg.validate()?;
    match with_pool(workers, || run_algo(&cfg, inst, &[], algo, k, seed))?? {
        Outcome::TwoStage(sol) => Ok(sol),
        Outcome::Direct { .. } => unreachable!("two-stage algorithms return solutions"),
    }
}

/// `(value, stderr)` of a two-stage solution under the configured evaluation.
fn evaluate(
    inst: &Instance,
    sol: &SeedingSolution,
    eval: Evaluation,
    seed: u64,
) -> Result<(f64, f64)> {
    let j = sol.second_stage_budget;
    let mc = |samples| -> Result<(f64, f64)> {
        let r = adaptive_value_mc(inst, &sol.seeds, j, samples, seed)?;
        Ok((r.mc.unwrap_or(0.0), r.stderr.unwrap_or(0.0)))
    };
    match eval {
        Evaluation::Relaxed => Ok((sol.value, 0.0)),
        Evaluation::Exact => Ok((adaptive_value_exact(inst, &sol.seeds, j)?, 0.0)),
        Evaluation::Mc(samples) => mc(samples),
        Evaluation::Auto(samples) => {
            if inst.neighborhood(&sol.seeds).len() <= EXACT_NEIGHBOR_CAP {
                Ok((adaptive_value_exact(inst, &sol.seeds, j)?, 0.0))
            } else {
                mc(samples)
            }
        }
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::Invalid(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Checks the config and that its inputs can be opened.
fn preflight(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.algos.is_empty() {
        return Err(BenchError::Invalid("no algorithms configured".into()));
    }
    if cfg.budgets.is_empty() && cfg.budget_fractions.is_empty() {
        return Err(BenchError::Invalid("no budgets configured".into()));
    }
    if let InputSpec::File(p) = &cfg.input {
        open_input(p)?;
    }
    if let CoreSpec::File(p) = &cfg.core {
        open_input(p)?;
    }
    Ok(())
}

fn config_echo(cfg: &ExperimentConfig, log: &mut String) {
    let _ = writeln!(log, "adaptive-seeding-bench {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(log, "--- config ---");
    log.push_str(&cfg.to_text());
    let _ = writeln!(log, "--- run ---");
}

/// Runs every (repetition, budget, algorithm) combination and writes
/// `results.csv`, `figure-<experiment>.svg` and `run.log` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<ResultRow>> {
    preflight(cfg)?;
    fs::create_dir_all(out_dir)?;
    let mut log = String::new();
    config_echo(cfg, &mut log);
    let rows = with_pool(cfg.workers, || experiment_rows(cfg, &mut log))??;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    fs::write(out_dir.join("results.csv"), &csv)?;
    let chart = svg::render_results(&csv, &cfg.experiment, cfg.log_scale)?;
    fs::write(
        out_dir.join(format!("figure-{}.svg", cfg.experiment)),
        chart,
    )?;
    fs::write(out_dir.join("run.log"), log)?;
    Ok(rows)
}

fn experiment_rows(cfg: &ExperimentConfig, log: &mut String) -> Result<Vec<ResultRow>> {
    let g = load_graph(&cfg.input, cfg.graph_seed)?;
    let weights = node_weights(&g, cfg.weights);
    let _ = writeln!(
        log,
        "graph: {} nodes, {} edges (graph_seed {})",
        g.node_count(),
        g.edge_count(),
        cfg.graph_seed
    );

    // build every instance first so configuration errors surface before any algorithm runs
    let mut instances = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let seed = cfg.seed.wrapping_add(rep as u64);
        let inst = make_instance(cfg, &g, &weights, seed)?;
        let budgets = resolve_budgets(cfg, inst.core_len());
        check_budgets(cfg, &budgets, inst.core_len())?;
        instances.push((seed, inst, budgets));
    }

    let mut rows = Vec::new();
    for (seed, inst, budgets) in &instances {
        let seed = *seed;
        let _ = writeln!(
            log,
            "repetition seed {seed}: core {} neighbors {} budgets {budgets:?}",
            inst.core_len(),
            inst.neighbor_len()
        );
        let core_w: Vec<f64> = inst.core_ids().iter().map(|&v| weights[v]).collect();
        for &k in budgets {
            for &algo in &cfg.algos {
                let start = Instant::now();
                let outcome = run_algo(
                    cfg,
                    inst,
                    &core_w,
                    algo,
                    k,
                    derive_seed(seed, Purpose::Algorithm),
                )?;
                let elapsed = start.elapsed().as_secs_f64() * 1e3;
                let (value, stderr, splits) = match &outcome {
                    Outcome::TwoStage(sol) => {
                        let (v, se) = evaluate(
                            inst,
                            sol,
                            cfg.evaluation,
                            derive_seed(seed, Purpose::Evaluation),
                        )?;
                        let _ = writeln!(
                            log,
                            "  {algo} k={k}: |S|={} t={} relaxed={} splits={}",
                            sol.seeds.len(),
                            sol.second_stage_budget,
                            sol.value,
                            sol.split_values.len()
                        );
                        (v, se, sol.split_values.len())
                    }
                    Outcome::Direct { value } => (*value, 0.0, 0),
                };
                rows.push(ResultRow {
                    experiment: cfg.experiment.clone(),
                    algo: algo.to_string(),
                    budget: k,
                    value,
                    stderr,
                    time_ms: cfg.timing.then_some(elapsed),
                    splits,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Smallest prefix of a seeded shuffle of the core whose neighborhood
/// reaches `target` neighbors.
pub fn subsample_core(inst: &Instance, target: usize, seed: u64) -> Result<Instance> {
    let mut order: Vec<usize> = (0..inst.core_len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut seen = vec![false; inst.neighbor_len()];
    let mut covered = 0;
    for (i, &c) in order.iter().enumerate() {
        for &r in inst.incidence(c) {
            if !seen[r as usize] {
                seen[r as usize] = true;
                covered += 1;
            }
        }
        if covered >= target {
            return Ok(inst.restrict_core(&order[..=i]));
        }
    }
    Err(BenchError::Invalid(format!(
        "the core set only reaches {covered} neighbors, fewer than the ladder size {target}"
    )))
}

/// Times every algorithm and budget on core subsamples whose neighborhoods
/// reach each ladder size. Writes `timing.csv` and `run.log`.
pub fn run_scaling(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<TimingRow>> {
    if cfg.ladder.is_empty() {
        return Err(BenchError::Invalid(
            "scaling needs at least one ladder size".into(),
        ));
    }
    preflight(cfg)?;
    fs::create_dir_all(out_dir)?;
    let mut log = String::new();
    config_echo(cfg, &mut log);
    let rows = with_pool(cfg.workers, || scaling_rows(cfg, &mut log))??;
    let mut csv = String::from(TIMING_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    fs::write(out_dir.join("timing.csv"), csv)?;
    fs::write(out_dir.join("run.log"), log)?;
    Ok(rows)
}

fn scaling_rows(cfg: &ExperimentConfig, log: &mut String) -> Result<Vec<TimingRow>> {
    let g = load_graph(&cfg.input, cfg.graph_seed)?;
    let weights = node_weights(&g, cfg.weights);
    let full = make_instance(cfg, &g, &weights, cfg.seed)?;
    let mut subs = Vec::with_capacity(cfg.ladder.len());
    for &target in &cfg.ladder {
        let inst = subsample_core(&full, target, derive_seed(cfg.seed, Purpose::Subsample))?;
        let budgets = resolve_budgets(cfg, inst.core_len());
        check_budgets(cfg, &budgets, inst.core_len())?;
        subs.push((inst, budgets));
    }
    let mut rows = Vec::new();
    for (inst, budgets) in &subs {
        let _ = writeln!(
            log,
            "ladder: core {} neighbors {}",
            inst.core_len(),
            inst.neighbor_len()
        );
        let core_w: Vec<f64> = inst.core_ids().iter().map(|&v| weights[v]).collect();
        for &k in budgets {
            for &algo in &cfg.algos {
                let mut best = f64::INFINITY;
                let mut value = 0.0;
                for _ in 0..cfg.timing_repeats {
                    let start = Instant::now();
                    let outcome = run_algo(
                        cfg,
                        inst,
                        &core_w,
                        algo,
                        k,
                        derive_seed(cfg.seed, Purpose::Algorithm),
                    )?;
                    best = best.min(start.elapsed().as_secs_f64() * 1e3);
                    value = match outcome {
                        Outcome::TwoStage(sol) => sol.value,
                        Outcome::Direct { value } => value,
                    };
                }
                let _ = writeln!(log, "  {algo} k={k}: {best:.3} ms");
                rows.push(TimingRow {
                    experiment: cfg.experiment.clone(),
                    algo: algo.to_string(),
                    neighbors: inst.neighbor_len(),
                    core: inst.core_len(),
                    budget: k,
                    time_ms: best,
                    value,
                });
            }
        }
    }
    Ok(rows)
}
