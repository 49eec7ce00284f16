//! `adseed`: generate graphs, compute seeding solutions, evaluate them and
//! run benchmark configurations.

use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_seeding::evaluation::{evaluate_adaptive, EXACT_NEIGHBOR_CAP};
use adaptive_seeding::graph::write_edge_list;
use adaptive_seeding::influence::ProbFamily;
use adaptive_seeding::instance::paradox_stats;
use adaptive_seeding::lp::build_lp;
use adaptive_seeding::Instance;
use adaptive_seeding_bench::config::{
    parse_algo, parse_core, parse_generator, Algo, CorePool, ExperimentConfig, InputSpec,
    WeightModel,
};
use adaptive_seeding_bench::experiment::{
    load_graph, make_instance_seeded, node_weights, run_single,
};
use adaptive_seeding_bench::svg::render_results;
use adaptive_seeding_bench::{run_experiment, run_scaling, BenchError, Result, SolutionRecord};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adseed", version, about = "Two-stage adaptive seeding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        /// Generator, e.g. `ba:n=10000,m0=10,attach=10`.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print graph statistics, plus friendship-paradox numbers when a core is given.
    Stats {
        #[command(flatten)]
        graph: GraphArgs,
        /// `file:PATH`, `random:N` or `random:FRACTION`.
        #[arg(long)]
        core: Option<String>,
        #[arg(long, default_value = "all")]
        core_pool: String,
        #[arg(long, default_value_t = 0)]
        core_seed: u64,
    },
    /// Compute a seeding solution; writes `solution.txt` and `instance.tsv`.
    Seed {
        #[command(flatten)]
        instance: InstanceArgs,
        /// greedy, greedy-geo, snp, lp or saa-greedy (parameters as in configs).
        #[arg(long, default_value = "greedy")]
        algo: String,
        #[arg(long)]
        k: usize,
        /// Split step for greedy-geo, threshold decay for snp.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Candidates sampled per snp round.
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Evaluate every candidate in every greedy step.
        #[arg(long)]
        no_lazy: bool,
        /// Also write the LP as `lp.txt`.
        #[arg(long)]
        lp_dump: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a solution against an instance dump.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Monte-Carlo samples (0 to skip).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Also compute the exact value.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run a benchmark configuration.
    Bench(RunArgs),
    /// Run the scaling ladder of a configuration.
    Scale(RunArgs),
    /// Render a chart from a results CSV.
    Plot {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "results")]
        title: String,
        #[arg(long)]
        log_scale: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "generator")]
    graph: Option<PathBuf>,
    /// Generator spec used instead of a file.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long, default_value_t = 1)]
    graph_seed: u64,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance dump; replaces every graph and model option.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value = "random:500")]
    core: String,
    #[arg(long, default_value = "all")]
    core_pool: String,
    #[arg(long, default_value_t = 0)]
    core_seed: u64,
    /// `degree` or `voter:T`.
    #[arg(long, default_value = "degree")]
    weights: String,
    #[arg(long, default_value = "uniform")]
    prob_family: String,
    #[arg(long, default_value_t = 1.0)]
    prob_mean: f64,
    #[arg(long, default_value_t = 0)]
    prob_seed: u64,
    #[arg(long)]
    exclude_core_from_neighbors: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `out`, then `out/<experiment>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Extra `key=value` lines applied after the config file.
    #[arg(long = "set")]
    overrides: Vec<String>,
}

fn config_error(message: String) -> BenchError {
    BenchError::Config { line: 0, message }
}

fn graph_input(args: &GraphArgs) -> Result<InputSpec> {
    match (&args.graph, &args.generator) {
        (Some(p), _) => Ok(InputSpec::File(p.clone())),
        (None, Some(g)) => Ok(InputSpec::Generator(parse_generator(0, g)?)),
        (None, None) => Err(BenchError::Invalid(
            "pass --graph FILE or --generator SPEC".into(),
        )),
    }
}

fn core_pool(text: &str) -> Result<CorePool> {
    match text {
        "all" => Ok(CorePool::All),
        "low-degree" => Ok(CorePool::LowDegree),
        other => Err(config_error(format!("unknown core pool `{other}`"))),
    }
}

fn weight_model(text: &str) -> Result<WeightModel> {
    match text.split_once(':') {
        None if text == "degree" => Ok(WeightModel::Degree),
        Some(("voter", t)) => t
            .parse()
            .map(WeightModel::Voter)
            .map_err(|_| config_error(format!("bad voter horizon `{t}`"))),
        _ => Err(config_error(format!("unknown weight model `{text}`"))),
    }
}

fn load_instance(args: &InstanceArgs) -> Result<Instance> {
    if let Some(path) = &args.instance {
        let file = fs::File::open(path).map_err(|source| BenchError::Input {
            path: path.display().to_string(),
            source,
        })?;
        return Ok(Instance::read_dump(BufReader::new(file))?);
    }
    let cfg = ExperimentConfig {
        input: graph_input(&args.graph)?,
        graph_seed: args.graph.graph_seed,
        core: parse_core(0, &args.core, core_pool(&args.core_pool)?)?,
        weights: weight_model(&args.weights)?,
        prob_family: ProbFamily::parse(&args.prob_family)?,
        prob_mean: args.prob_mean,
        exclude_core_from_neighbors: args.exclude_core_from_neighbors,
        ..ExperimentConfig::default()
    };
    let g = load_graph(&cfg.input, cfg.graph_seed)?;
    let weights = node_weights(&g, cfg.weights);
    make_instance_seeded(&cfg, &g, &weights, args.core_seed, args.prob_seed)
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn with_epsilon(algo: Algo, epsilon: Option<f64>, sample_size: Option<usize>) -> Algo {
    match algo {
        Algo::GreedyGeo { epsilon: e } => Algo::GreedyGeo {
            epsilon: epsilon.unwrap_or(e),
        },
        Algo::Snp {
            epsilon: e,
            sample_size: l,
        } => Algo::Snp {
            epsilon: epsilon.unwrap_or(e),
            sample_size: sample_size.unwrap_or(l),
        },
        other => other,
    }
}

/// `snp` alone takes its parameters from the flags.
fn parse_cli_algo(text: &str, epsilon: Option<f64>, sample_size: Option<usize>) -> Result<Algo> {
    let algo = if text == "snp" {
        Algo::Snp {
            epsilon: epsilon.unwrap_or(0.1),
            sample_size: sample_size.unwrap_or(100),
        }
    } else {
        with_epsilon(parse_algo(0, text)?, epsilon, sample_size)
    };
    if !algo.two_stage() {
        return Err(BenchError::Invalid(format!(
            "`{algo}` is a baseline; use bench to run it"
        )));
    }
    Ok(algo)
}

fn run_config(args: &RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut text = fs::read_to_string(&args.config).map_err(|source| BenchError::Input {
        path: args.config.display().to_string(),
        source,
    })?;
    for o in &args.overrides {
        text.push('\n');
        text.push_str(o);
    }
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(w) = args.workers {
        cfg.workers = w;
        cfg.validate()?;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| Path::new("out").join(&cfg.experiment));
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { kind, seed, output } => {
            let g = parse_generator(0, &kind)?.generate(seed)?;
            write_file(&output, |w| write_edge_list(&g, w))?;
            println!(
                "wrote {} nodes, {} edges to {}",
                g.node_count(),
                g.edge_count(),
                output.display()
            );
        }
        Command::Stats {
            graph,
            core,
            core_pool: pool,
            core_seed,
        } => {
            let g = load_graph(&graph_input(&graph)?, graph.graph_seed)?;
            println!("nodes {}", g.node_count());
            println!("edges {}", g.edge_count());
            println!("mean_degree {}", g.mean_degree());
            println!("max_degree {}", g.max_degree());
            if let Some(core) = core {
                let spec = parse_core(0, &core, core_pool(&pool)?)?;
                let core = adaptive_seeding_bench::experiment::select_core(&g, &spec, core_seed)?;
                let s = paradox_stats(&g, &core)?;
                println!("core_size {}", core.len());
                println!("mean_degree_core {}", s.mean_degree_core);
                println!("mean_degree_neighbors {}", s.mean_degree_neighbors);
            }
        }
        Command::Seed {
            instance,
            algo,
            k,
            epsilon,
            sample_size,
            workers,
            no_lazy,
            lp_dump,
            out,
        } => {
            let algo = parse_cli_algo(&algo, epsilon, sample_size)?;
            let inst = load_instance(&instance)?;
            let sol = run_single(&inst, algo, k, workers, !no_lazy, instance.prob_seed)?;
            fs::create_dir_all(&out)?;
            let record = SolutionRecord {
                algo: algo.to_string(),
                budget: k,
                second_stage_budget: sol.second_stage_budget,
                value: sol.value,
                seeds: sol.seed_ids(&inst),
            };
            fs::write(out.join("solution.txt"), record.to_text())?;
            write_file(&out.join("instance.tsv"), |w| inst.write_dump(w))?;
            if lp_dump {
                write_file(&out.join("lp.txt"), |w| build_lp(&inst, k).write_dump(w))?;
            }
            print!("{}", record.to_text());
        }
        Command::Eval {
            instance,
            solution,
            samples,
            exact,
            seed,
            workers,
        } => {
            let file = fs::File::open(&instance).map_err(|source| BenchError::Input {
                path: instance.display().to_string(),
                source,
            })?;
            let inst = Instance::read_dump(BufReader::new(file))?;
            let text = fs::read_to_string(&solution).map_err(|source| BenchError::Input {
                path: solution.display().to_string(),
                source,
            })?;
            let record = SolutionRecord::parse(&text)?;
            let seeds = record
                .seeds
                .iter()
                .map(|&id| {
                    inst.core_index(id).ok_or_else(|| {
                        BenchError::Invalid(format!("seed {id} is not a core node of the instance"))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            let neighborhood = inst.neighborhood(&seeds).len();
            if exact && neighborhood > EXACT_NEIGHBOR_CAP {
                return Err(BenchError::Invalid(format!(
                    "neighborhood of {neighborhood} exceeds the exact-evaluation cap {EXACT_NEIGHBOR_CAP}"
                )));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| BenchError::Invalid(e.to_string()))?;
            let report = pool.install(|| {
                evaluate_adaptive(
                    &inst,
                    &seeds,
                    record.second_stage_budget,
                    samples,
                    seed,
                    exact,
                )
            })?;
            println!("algo {}", record.algo);
            println!("budget {}", record.budget);
            println!("seeds {}", seeds.len());
            println!("second_stage_budget {}", record.second_stage_budget);
            println!("neighborhood {neighborhood}");
            println!("relaxed_value {}", record.value);
            println!("method {}", report.method.name());
            if let Some(v) = report.exact {
                println!("exact {v}");
            }
            if let (Some(m), Some(se)) = (report.mc, report.stderr) {
                println!("mc {m}");
                println!("stderr {se}");
                println!("samples {}", report.samples);
            }
        }
        Command::Bench(args) => {
            let (cfg, out) = run_config(&args)?;
            let rows = run_experiment(&cfg, &out)?;
            println!(
                "{} rows written to {}",
                rows.len(),
                out.join("results.csv").display()
            );
        }
        Command::Scale(args) => {
            let (cfg, out) = run_config(&args)?;
            let rows = run_scaling(&cfg, &out)?;
            println!(
                "{} rows written to {}",
                rows.len(),
                out.join("timing.csv").display()
            );
        }
        Command::Plot {
            results,
            title,
            log_scale,
            output,
        } => {
            let csv = fs::read_to_string(&results).map_err(|source| BenchError::Input {
                path: results.display().to_string(),
                source,
            })?;
            fs::write(&output, render_results(&csv, &title, log_scale)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
