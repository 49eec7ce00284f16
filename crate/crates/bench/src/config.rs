//! Experiment configuration in a flat `key = value` format.
//!
//! Lists are written as repeated keys (`algo = greedy` on one line,
//! `algo = im` on the next). Blank lines and `#` comments are ignored.
//! `ExperimentConfig::to_text` writes every key in a fixed order, and
//! parsing that text gives back the same config.

use std::fmt;
use std::path::PathBuf;

use adaptive_seeding::generators::GeneratorSpec;
use adaptive_seeding::influence::ProbFamily;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    File(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amount {
    Count(usize),
    Fraction(f64),
}

/// Which nodes a random core set is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorePool {
    All,
    /// Nodes whose degree is at most the median degree.
    LowDegree,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreSpec {
    /// One node id per line (ids as written in the edge list).
    File(PathBuf),
    Random {
        amount: Amount,
        pool: CorePool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    Degree,
    Voter(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algo {
    Greedy,
    GreedyGeo {
        epsilon: f64,
    },
    Snp {
        epsilon: f64,
        sample_size: usize,
    },
    Lp,
    Rn,
    Im,
    Rf,
    /// `samples = None` uses one sample per neighbor.
    SaaGreedy {
        samples: Option<usize>,
    },
}

impl Algo {
    pub fn two_stage(&self) -> bool {
        !matches!(self, Algo::Rn | Algo::Im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Exact,
    Mc(usize),
    /// Exact when the neighborhood is small enough, Monte-Carlo otherwise.
    Auto(usize),
    /// The non-adaptive value reported by the algorithm.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub input: InputSpec,
    pub graph_seed: u64,
    pub core: CoreSpec,
    pub weights: WeightModel,
    pub prob_family: ProbFamily,
    pub prob_mean: f64,
    pub budgets: Vec<usize>,
    pub budget_fractions: Vec<f64>,
    pub algos: Vec<Algo>,
    pub evaluation: Evaluation,
    pub repetitions: usize,
    pub seed: u64,
    pub workers: usize,
    pub lazy: bool,
    pub timing: bool,
    pub exclude_core_from_neighbors: bool,
    pub log_scale: bool,
    /// Target neighborhood sizes for scaling runs.
    pub ladder: Vec<usize>,
    pub timing_repeats: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "experiment".into(),
            input: InputSpec::Generator(GeneratorSpec::BarabasiAlbert {
                n: 10_000,
                m0: 5,
                attach: 5,
            }),
            graph_seed: 1,
            core: CoreSpec::Random {
                amount: Amount::Count(500),
                pool: CorePool::All,
            },
            weights: WeightModel::Degree,
            prob_family: ProbFamily::Uniform,
            prob_mean: 1.0,
            budgets: Vec::new(),
            budget_fractions: Vec::new(),
            algos: Vec::new(),
            evaluation: Evaluation::Auto(10_000),
            repetitions: 1,
            seed: 0,
            workers: 1,
            lazy: true,
            timing: false,
            exclude_core_from_neighbors: false,
            log_scale: false,
            ladder: Vec::new(),
            timing_repeats: 1,
            out: None,
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> BenchError {
    BenchError::Config {
        line,
        message: msg.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| bad(line, format!("`{key}` expects a number, got `{v}`")))
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(
            line,
            format!("`{key}` expects true or false, got `{v}`"),
        )),
    }
}

/// `name:k=v,k=v` parameter lists.
fn params(line: usize, body: &str) -> Result<Vec<(&str, &str)>> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(line, format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn get<T: std::str::FromStr>(line: usize, ps: &[(&str, &str)], key: &str) -> Result<T> {
    let v = ps
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| bad(line, format!("missing generator parameter `{key}`")))?;
    num(line, key, v)
}

pub fn parse_generator(line: usize, text: &str) -> Result<GeneratorSpec> {
    let (name, body) = text.split_once(':').unwrap_or((text, ""));
    let ps = params(line, body)?;
    Ok(match name {
        "ba" => GeneratorSpec::BarabasiAlbert {
            n: get(line, &ps, "n")?,
            m0: get(line, &ps, "m0")?,
            attach: get(line, &ps, "attach")?,
        },
        "ws" => GeneratorSpec::WattsStrogatz {
            n: get(line, &ps, "n")?,
            ring_degree: get(line, &ps, "ring_degree")?,
            beta: get(line, &ps, "beta")?,
        },
        "kronecker" => GeneratorSpec::KroneckerStar {
            leaves: get(line, &ps, "leaves")?,
            power: get(line, &ps, "power")?,
        },
        "configuration" => GeneratorSpec::Configuration {
            n: get(line, &ps, "n")?,
            exponent: get(line, &ps, "exponent")?,
            min_degree: get(line, &ps, "min_degree")?,
            max_degree: get(line, &ps, "max_degree")?,
        },
        other => return Err(bad(line, format!("unknown generator `{other}`"))),
    })
}

pub fn generator_text(g: &GeneratorSpec) -> String {
    match g {
        GeneratorSpec::BarabasiAlbert { n, m0, attach } => format!("ba:n={n},m0={m0},attach={attach}"),
        GeneratorSpec::WattsStrogatz { n, ring_degree, beta } => {
            format!("ws:n={n},ring_degree={ring_degree},beta={beta}")
        }
        GeneratorSpec::KroneckerStar { leaves, power } => format!("kronecker:leaves={leaves},power={power}"),
        GeneratorSpec::Configuration { n, exponent, min_degree, max_degree } => format!(
            "configuration:n={n},exponent={exponent},min_degree={min_degree},max_degree={max_degree}"
        ),
    }
}

pub fn parse_algo(line: usize, text: &str) -> Result<Algo> {
    let parts: Vec<&str> = text.split(':').collect();
    let arg = |i: usize| -> Result<&str> {
        parts
            .get(i)
            .copied()
            .ok_or_else(|| bad(line, format!("`{text}` needs more parameters")))
    };
    let algo = match parts[0] {
        "greedy" => Algo::Greedy,
        "greedy-geo" => Algo::GreedyGeo {
            epsilon: if parts.len() > 1 {
                num(line, "greedy-geo", arg(1)?)?
            } else {
                1.0
            },
        },
        "snp" => Algo::Snp {
            epsilon: num(line, "snp", arg(1)?)?,
            sample_size: num(line, "snp", arg(2)?)?,
        },
        "lp" => Algo::Lp,
        "rn" => Algo::Rn,
        "im" => Algo::Im,
        "rf" => Algo::Rf,
        "saa-greedy" => Algo::SaaGreedy {
            samples: if parts.len() > 1 {
                Some(num(line, "saa-greedy", arg(1)?)?)
            } else {
                None
            },
        },
        other => return Err(bad(line, format!("unknown algorithm `{other}`"))),
    };
    let expected = match algo {
        Algo::Snp { .. } => 3,
        Algo::GreedyGeo { .. } | Algo::SaaGreedy { .. } => parts.len().min(2),
        _ => 1,
    };
    if parts.len() != expected {
        return Err(bad(line, format!("too many parameters in `{text}`")));
    }
    Ok(algo)
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::Greedy => write!(f, "greedy"),
            Algo::GreedyGeo { epsilon } => write!(f, "greedy-geo:{epsilon}"),
            Algo::Snp {
                epsilon,
                sample_size,
            } => write!(f, "snp:{epsilon}:{sample_size}"),
            Algo::Lp => write!(f, "lp"),
            Algo::Rn => write!(f, "rn"),
            Algo::Im => write!(f, "im"),
            Algo::Rf => write!(f, "rf"),
            Algo::SaaGreedy { samples: None } => write!(f, "saa-greedy"),
            Algo::SaaGreedy { samples: Some(s) } => write!(f, "saa-greedy:{s}"),
        }
    }
}

pub fn parse_core(line: usize, text: &str, pool: CorePool) -> Result<CoreSpec> {
    if let Some(path) = text.strip_prefix("file:") {
        return Ok(CoreSpec::File(PathBuf::from(path)));
    }
    if let Some(amount) = text.strip_prefix("random:") {
        let amount = if amount.contains('.') {
            Amount::Fraction(num(line, "core", amount)?)
        } else {
            Amount::Count(num(line, "core", amount)?)
        };
        return Ok(CoreSpec::Random { amount, pool });
    }
    Err(bad(
        line,
        format!("core must be file:PATH or random:AMOUNT, got `{text}`"),
    ))
}

pub fn parse_evaluation(line: usize, text: &str) -> Result<Evaluation> {
    let (name, arg) = text.split_once(':').unwrap_or((text, ""));
    Ok(match name {
        "exact" if arg.is_empty() => Evaluation::Exact,
        "relaxed" if arg.is_empty() => Evaluation::Relaxed,
        "mc" => Evaluation::Mc(num(line, "evaluation", arg)?),
        "auto" => Evaluation::Auto(num(line, "evaluation", arg)?),
        _ => return Err(bad(line, format!("unknown evaluation `{text}`"))),
    })
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluation::Exact => write!(f, "exact"),
            Evaluation::Relaxed => write!(f, "relaxed"),
            Evaluation::Mc(s) => write!(f, "mc:{s}"),
            Evaluation::Auto(s) => write!(f, "auto:{s}"),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut core_text: Option<(usize, String)> = None;
        let mut pool = CorePool::All;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(line, "expected `key = value`"))?;
            match key {
                "experiment" => c.experiment = value.to_string(),
                "input" => {
                    c.input = match value.strip_prefix("file:") {
                        Some(path) => InputSpec::File(PathBuf::from(path)),
                        None => InputSpec::Generator(parse_generator(line, value)?),
                    }
                }
                "graph_seed" => c.graph_seed = num(line, key, value)?,
                "core" => core_text = Some((line, value.to_string())),
                "core_pool" => {
                    pool = match value {
                        "all" => CorePool::All,
                        "low-degree" => CorePool::LowDegree,
                        _ => return Err(bad(line, format!("unknown core pool `{value}`"))),
                    }
                }
                "weights" => {
                    c.weights = match value.split_once(':') {
                        None if value == "degree" => WeightModel::Degree,
                        Some(("voter", t)) => WeightModel::Voter(num(line, key, t)?),
                        _ => return Err(bad(line, format!("unknown weight model `{value}`"))),
                    }
                }
                "prob_family" => {
                    c.prob_family =
                        ProbFamily::parse(value).map_err(|e| bad(line, e.to_string()))?
                }
                "prob_mean" => c.prob_mean = num(line, key, value)?,
                "budget" => c.budgets.push(num(line, key, value)?),
                "budget_fraction" => c.budget_fractions.push(num(line, key, value)?),
                "algo" => c.algos.push(parse_algo(line, value)?),
                "evaluation" => c.evaluation = parse_evaluation(line, value)?,
                "repetitions" => c.repetitions = num(line, key, value)?,
                "seed" => c.seed = num(line, key, value)?,
                "workers" => c.workers = num(line, key, value)?,
                "lazy" => c.lazy = boolean(line, key, value)?,
                "timing" => c.timing = boolean(line, key, value)?,
                "exclude_core_from_neighbors" => {
                    c.exclude_core_from_neighbors = boolean(line, key, value)?
                }
                "log_scale" => c.log_scale = boolean(line, key, value)?,
                "ladder" => c.ladder.push(num(line, key, value)?),
                "timing_repeats" => c.timing_repeats = num(line, key, value)?,
                "out" => c.out = Some(PathBuf::from(value)),
                _ => return Err(bad(line, format!("unknown key `{key}`"))),
            }
        }
        if let Some((line, text)) = core_text {
            c.core = parse_core(line, &text, pool)?;
        } else if let CoreSpec::Random { pool: p, .. } = &mut c.core {
            *p = pool;
        }
        c.validate()?;
        Ok(c)
    }

    /// Checks everything that can be checked without reading inputs.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(BenchError::Invalid(m));
        if self.experiment.is_empty() || self.experiment.contains([',', '"', '\n']) {
            return err(format!(
                "experiment id `{}` must be non-empty without commas or quotes",
                self.experiment
            ));
        }
        if self.repetitions == 0 {
            return err("repetitions must be >= 1".into());
        }
        if self.workers == 0 || self.timing_repeats == 0 {
            return err("workers and timing_repeats must be >= 1".into());
        }
        if let Some(f) = self
            .budget_fractions
            .iter()
            .find(|f| !(**f > 0.0 && **f <= 1.0))
        {
            return err(format!("budget fraction {f} outside (0,1]"));
        }
        if let CoreSpec::Random {
            amount: Amount::Fraction(f),
            ..
        } = self.core
        {
            if !(f > 0.0 && f <= 1.0) {
                return err(format!("core fraction {f} outside (0,1]"));
            }
        }
        if self.algos.iter().any(Algo::two_stage) {
            if let Some(b) = self.budgets.iter().find(|&&b| b < 2) {
                return err(format!("budget {b} leaves no room for two stages"));
            }
        }
        for a in &self.algos {
            match *a {
                Algo::Snp {
                    epsilon,
                    sample_size,
                } if !(epsilon > 0.0 && epsilon < 1.0) || sample_size == 0 => {
                    return err(format!("invalid sample-and-prune parameters in `{a}`"));
                }
                Algo::GreedyGeo { epsilon } if epsilon <= 0.0 => {
                    return err(format!("invalid split step in `{a}`"));
                }
                Algo::SaaGreedy { samples: Some(0) } => {
                    return err("saa-greedy needs >= 1 sample".into())
                }
                _ => {}
            }
        }
        if matches!(self.evaluation, Evaluation::Mc(0) | Evaluation::Auto(0)) {
            return err("Monte-Carlo evaluation needs >= 1 sample".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("experiment", self.experiment.clone());
        put(
            "input",
            match &self.input {
                InputSpec::File(p) => format!("file:{}", p.display()),
                InputSpec::Generator(g) => generator_text(g),
            },
        );
        put("graph_seed", self.graph_seed.to_string());
        match &self.core {
            CoreSpec::File(p) => put("core", format!("file:{}", p.display())),
            CoreSpec::Random { amount, pool } => {
                put(
                    "core",
                    match amount {
                        Amount::Count(n) => format!("random:{n}"),
                        Amount::Fraction(f) => format!("random:{f:?}"),
                    },
                );
                put(
                    "core_pool",
                    match pool {
                        CorePool::All => "all".into(),
                        CorePool::LowDegree => "low-degree".into(),
                    },
                );
            }
        }
        put(
            "weights",
            match self.weights {
                WeightModel::Degree => "degree".into(),
                WeightModel::Voter(t) => format!("voter:{t}"),
            },
        );
        put("prob_family", self.prob_family.label());
        put("prob_mean", self.prob_mean.to_string());
        for b in &self.budgets {
            put("budget", b.to_string());
        }
        for f in &self.budget_fractions {
            put("budget_fraction", f.to_string());
        }
        for a in &self.algos {
            put("algo", a.to_string());
        }
        put("evaluation", self.evaluation.to_string());
        put("repetitions", self.repetitions.to_string());
        put("seed", self.seed.to_string());
        put("workers", self.workers.to_string());
        put("lazy", self.lazy.to_string());
        put("timing", self.timing.to_string());
        put(
            "exclude_core_from_neighbors",
            self.exclude_core_from_neighbors.to_string(),
        );
        put("log_scale", self.log_scale.to_string());
        for l in &self.ladder {
            put("ladder", l.to_string());
        }
        put("timing_repeats", self.timing_repeats.to_string());
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        out
    }
}
