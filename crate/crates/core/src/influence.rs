//! Linear influence weights, realization probabilities, and sampling of the
//! second stage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;

/// β of the Beta family; α is solved from the target mean.
pub const BETA_SHAPE: f64 = 5.0;
/// Standard deviation of the Normal family.
pub const NORMAL_SD: f64 = 0.01;
/// Default exponent of the power-law family.
pub const POWER_LAW_EXPONENT: f64 = 2.5;
/// Lower end of the power-law support before rescaling.
pub const POWER_LAW_XMIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSource {
    Degree,
    Voter { steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceWeights {
    pub values: Vec<f64>,
    pub source: WeightSource,
}

pub fn degree_weights(g: &Graph) -> InfluenceWeights {
    InfluenceWeights {
        values: (0..g.node_count()).map(|u| g.degree(u) as f64).collect(),
        source: WeightSource::Degree,
    }
}

/// Expected number of nodes holding `u`'s initial opinion after `steps`
/// rounds of the voter model: `(Mᵀ)^t · 1` for the random-walk matrix `M`.
/// Isolated nodes keep their own opinion.
pub fn voter_weights(g: &Graph, steps: usize) -> InfluenceWeights {
    let n = g.node_count();
    let mut w = vec![1.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        for (u, slot) in next.iter_mut().enumerate() {
            let nbrs = g.neighbors(u);
            *slot = if nbrs.is_empty() {
                w[u]
            } else {
                nbrs.iter()
                    .map(|&v| w[v as usize] / g.degree(v as usize) as f64)
                    .sum()
            };
        }
        std::mem::swap(&mut w, &mut next);
    }
    InfluenceWeights {
        values: w,
        source: WeightSource::Voter { steps },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbFamily {
    Uniform,
    Beta,
    Normal,
    PowerLaw { exponent: f64 },
    InverseDegree,
}

impl ProbFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ProbFamily::Uniform => "uniform",
            ProbFamily::Beta => "beta",
            ProbFamily::Normal => "normal",
            ProbFamily::PowerLaw { .. } => "power_law",
            ProbFamily::InverseDegree => "inverse_degree",
        }
    }

    /// Like `name`, with the exponent appended for the power-law family;
    /// `parse(label())` gives back the same family.
    pub fn label(&self) -> String {
        match self {
            ProbFamily::PowerLaw { exponent } => format!("power_law:{exponent}"),
            other => other.name().to_string(),
        }
    }

    /// Accepts the names above; `power_law:<exponent>` sets the exponent.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(e) = s
            .strip_prefix("power_law:")
            .or_else(|| s.strip_prefix("power-law:"))
        {
            let exponent: f64 = e
                .parse()
                .map_err(|_| Error::param(format!("bad power-law exponent {e:?}")))?;
            return Ok(ProbFamily::PowerLaw { exponent });
        }
        Ok(match s {
            "uniform" => ProbFamily::Uniform,
            "beta" => ProbFamily::Beta,
            "normal" => ProbFamily::Normal,
            "power_law" | "power-law" => ProbFamily::PowerLaw {
                exponent: POWER_LAW_EXPONENT,
            },
            "inverse_degree" | "inverse-degree" => ProbFamily::InverseDegree,
            other => {
                return Err(Error::param(format!(
                    "unknown probability family {other:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityModel {
    pub family: ProbFamily,
    pub mean: f64,
    pub seed: u64,
}

impl ProbabilityModel {
    pub fn uniform(mean: f64) -> Self {
        ProbabilityModel {
            family: ProbFamily::Uniform,
            mean,
            seed: 0,
        }
    }

    /// α giving the Beta(α, 5) family the target mean.
    pub fn beta_alpha(mean: f64) -> f64 {
        BETA_SHAPE * mean / (1.0 - mean)
    }

    /// Draws one probability per neighbor, in rank order.
    pub fn sample(&self, degrees: &[usize]) -> Result<Vec<f64>> {
        let mean = self.mean;
        let n = degrees.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let feasible = match self.family {
            ProbFamily::Uniform | ProbFamily::Normal => (0.0..=1.0).contains(&mean),
            ProbFamily::Beta => mean > 0.0 && mean < 1.0,
            ProbFamily::PowerLaw { .. } | ProbFamily::InverseDegree => mean > 0.0 && mean <= 1.0,
        };
        if !feasible {
            return Err(Error::param(format!(
                "mean {mean} infeasible for the {} family",
                self.family.name()
            )));
        }
        Ok(match self.family {
            ProbFamily::Uniform => vec![mean; n],
            ProbFamily::Beta => {
                let dist = Beta::new(Self::beta_alpha(mean), BETA_SHAPE)
                    .map_err(|e| Error::param(e.to_string()))?;
                (0..n).map(|_| dist.sample(&mut rng)).collect()
            }
            ProbFamily::Normal => {
                let dist = Normal::new(mean, NORMAL_SD).map_err(|e| Error::param(e.to_string()))?;
                (0..n)
                    .map(|_| dist.sample(&mut rng).clamp(0.0, 1.0))
                    .collect()
            }
            ProbFamily::PowerLaw { exponent } => {
                if exponent <= 1.0 {
                    return Err(Error::param("power-law exponent must exceed 1"));
                }
                let a = 1.0 - exponent;
                let lo = POWER_LAW_XMIN.powf(a);
                let raw: Vec<f64> = (0..n)
                    .map(|_| {
                        let u: f64 = rng.gen();
                        (lo - u * (lo - 1.0)).powf(1.0 / a)
                    })
                    .collect();
                scale_to_mean(&raw, mean)
            }
            ProbFamily::InverseDegree => {
                let raw: Vec<f64> = degrees.iter().map(|&d| 1.0 / d.max(1) as f64).collect();
                scale_to_mean(&raw, mean)
            }
        })
    }
}

/// Returns `min(1, c·x)` with `c` chosen so the mean equals `target`.
/// Requires positive `x` and `0 < target <= 1`.
pub fn scale_to_mean(x: &[f64], target: f64) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    // suffix[j] = Σ_{i>=j} sorted[i]
    let mut suffix = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + sorted[j];
    }
    let goal = target * n as f64;
    let mut c = 1.0 / sorted[n - 1];
    // the j largest entries are clipped to 1
    for j in 0..n {
        let cand = (goal - j as f64) / suffix[j];
        let clipped_ok = j == 0 || cand * sorted[j - 1] >= 1.0;
        if cand * sorted[j] <= 1.0 && clipped_ok {
            c = cand;
            break;
        }
    }
    x.iter().map(|&v| (c * v).min(1.0)).collect()
}

/// Replaces the instance's probabilities with draws from `model`.
pub fn assign_probabilities(inst: &mut Instance, model: &ProbabilityModel) -> Result<()> {
    let probs = model.sample(inst.neighbor_degrees())?;
    inst.set_probs(probs)
}

/// Realized neighbors (ranks, ascending) when `seeds` are seeded.
pub fn sample_realization(inst: &Instance, seeds: &[usize], seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    realize(inst, &inst.neighborhood(seeds), &mut rng)
}

pub(crate) fn realize<R: Rng>(inst: &Instance, candidates: &[u32], rng: &mut R) -> Vec<u32> {
    let probs = inst.probs();
    candidates
        .iter()
        .copied()
        .filter(|&r| rng.gen::<f64>() < probs[r as usize])
        .collect()
}

/// Turns a fractional second-stage allocation into a set that always fits
/// the budget: keep each realized `u` with probability `q[u]`, then if more
/// than `⌊budget⌋` survive keep the highest-weight ones. `q` is indexed by rank.
pub fn select_feasible(realized: &[u32], q: &[f64], budget: f64, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    select_feasible_with(realized, q, budget, &mut rng)
}

pub(crate) fn select_feasible_with<R: Rng>(
    realized: &[u32],
    q: &[f64],
    budget: f64,
    rng: &mut R,
) -> Vec<u32> {
    let cap = if budget > 0.0 {
        budget.floor() as usize
    } else {
        0
    };
    let mut kept: Vec<u32> = realized
        .iter()
        .copied()
        .filter(|&r| rng.gen::<f64>() < q[r as usize])
        .collect();
    // ranks are weight order, so the smallest ranks are the heaviest
    kept.sort_unstable();
    kept.truncate(cap);
    assert!(kept.len() <= cap, "feasible set exceeds budget");
    kept
}
