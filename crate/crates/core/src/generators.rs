//! Synthetic graph generators. Every generator is a deterministic function
//! of its parameters and seed.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest node count `kronecker` will build.
pub const KRONECKER_NODE_CAP: usize = 1 << 20;
/// Largest edge count `kronecker` will build.
pub const KRONECKER_EDGE_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    BarabasiAlbert {
        n: usize,
        m0: usize,
        attach: usize,
    },
    WattsStrogatz {
        n: usize,
        ring_degree: usize,
        beta: f64,
    },
    /// Kronecker power of the star with `leaves` leaves.
    KroneckerStar {
        leaves: usize,
        power: u32,
    },
    /// Configuration model over a truncated power-law degree sequence.
    Configuration {
        n: usize,
        exponent: f64,
        min_degree: usize,
        max_degree: usize,
    },
}

impl GeneratorSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GeneratorSpec::BarabasiAlbert { n, m0, attach } => barabasi_albert(n, m0, attach, seed),
            GeneratorSpec::WattsStrogatz {
                n,
                ring_degree,
                beta,
            } => watts_strogatz(n, ring_degree, beta, seed),
            GeneratorSpec::KroneckerStar { leaves, power } => kronecker(&star(leaves)?, power),
            GeneratorSpec::Configuration {
                n,
                exponent,
                min_degree,
                max_degree,
            } => {
                let seq = power_law_degrees(n, exponent, min_degree, max_degree, seed)?;
                configuration_model(&seq, seed).map(|(g, _)| g)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::BarabasiAlbert { .. } => "barabasi_albert",
            GeneratorSpec::WattsStrogatz { .. } => "watts_strogatz",
            GeneratorSpec::KroneckerStar { .. } => "kronecker",
            GeneratorSpec::Configuration { .. } => "configuration",
        }
    }
}

/// Preferential attachment grown from a clique on `m0` nodes. Each arriving
/// node links to `attach` distinct existing nodes picked with probability
/// proportional to their current degree.
pub fn barabasi_albert(n: usize, m0: usize, attach: usize, seed: u64) -> Result<Graph> {
    if !(attach >= 1 && m0 >= attach && n >= m0) {
        return Err(Error::param(format!(
            "barabasi_albert needs n >= m0 >= attach >= 1 (n={n}, m0={m0}, attach={attach})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m0 * (m0 - 1) / 2 + attach * (n - m0));
    // every edge endpoint appears once: sampling uniformly from it is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..m0 {
        for v in (u + 1)..m0 {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(attach);
    for u in m0..n {
        targets.clear();
        while targets.len() < attach {
            let v = if endpoints.is_empty() {
                rng.gen_range(0..u)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        for &v in &targets {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

/// Ring lattice with `ring_degree / 2` neighbors per side, each edge rewired
/// with probability `beta` to a uniformly chosen non-adjacent endpoint.
pub fn watts_strogatz(n: usize, ring_degree: usize, beta: f64, seed: u64) -> Result<Graph> {
    if !ring_degree.is_multiple_of(2) || ring_degree >= n || ring_degree == 0 {
        return Err(Error::param(format!(
            "watts_strogatz needs an even ring_degree in [2, n) (n={n}, ring_degree={ring_degree})"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param(format!(
            "rewire probability {beta} outside [0,1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::with_capacity(ring_degree); n];
    for u in 0..n {
        for j in 1..=ring_degree / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=ring_degree / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.gen::<f64>() >= beta || !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .collect::<Vec<_>>();
    Graph::from_edges(n, edges)
}

/// Star graph: center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Result<Graph> {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
}

/// Node and edge counts of the Kronecker power, without building it.
pub fn kronecker_size(initiator: &Graph, power: u32) -> (u128, u128) {
    let n = initiator.node_count() as u128;
    // nonzeros of the initiator adjacency once self-loops are added
    let nnz = (2 * initiator.edge_count() + initiator.node_count()) as u128;
    let nodes = n.pow(power);
    let loops = nodes;
    (nodes, (nnz.pow(power) - loops) / 2)
}

/// Deterministic Kronecker power of the initiator's adjacency matrix with
/// self-loops added; self-loops are removed from the result.
pub fn kronecker(initiator: &Graph, power: u32) -> Result<Graph> {
    if power < 1 {
        return Err(Error::param("kronecker power must be >= 1"));
    }
    let base = initiator.node_count();
    if base == 0 || base > 8 {
        return Err(Error::param("kronecker initiator must have 1..=8 nodes"));
    }
    let (nodes, edges) = kronecker_size(initiator, power);
    if nodes > KRONECKER_NODE_CAP as u128 || edges > KRONECKER_EDGE_CAP as u128 {
        return Err(Error::param(format!(
            "kronecker power {power} gives {nodes} nodes / {edges} edges, above the cap"
        )));
    }
    let mut pairs: Vec<(usize, usize)> = (0..base).map(|u| (u, u)).collect();
    pairs.extend(initiator.edges().flat_map(|(u, v)| [(u, v), (v, u)]));
    // current ⊗ initiator, one factor at a time
    let mut current = pairs.clone();
    for _ in 1..power {
        let mut next = Vec::with_capacity(current.len() * pairs.len());
        for &(i, j) in &current {
            for &(a, b) in &pairs {
                next.push((i * base + a, j * base + b));
            }
        }
        current = next;
    }
    let n = nodes as usize;
    Graph::from_edges(n, current.into_iter().filter(|&(u, v)| u < v))
}

/// Stub matching. Returns the graph and the number of stubs discarded
/// because they formed self-loops or repeated edges.
pub fn configuration_model(degrees: &[usize], seed: u64) -> Result<(Graph, usize)> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if !total.is_multiple_of(2) {
        return Err(Error::param(format!("degree sum {total} is odd")));
    }
    if let Some(&d) = degrees.iter().find(|&&d| d >= n.max(1)) {
        return Err(Error::param(format!("degree {d} not below node count {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u, d))
        .collect();
    stubs.shuffle(&mut rng);
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(total / 2);
    let mut edges = Vec::with_capacity(total / 2);
    let mut discarded = 0;
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            discarded += 2;
        } else {
            edges.push((u, v));
        }
    }
    Ok((Graph::from_edges(n, edges)?, discarded))
}

/// Degree sequence drawn from a discrete power law `P(d) ∝ d^-exponent` on
/// `[min_degree, max_degree]`; the sum is made even by bumping one entry.
pub fn power_law_degrees(
    n: usize,
    exponent: f64,
    min_degree: usize,
    max_degree: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if !(min_degree >= 1 && max_degree >= min_degree && max_degree < n && exponent > 1.0) {
        return Err(Error::param(
            "power-law degrees need 1 <= min <= max < n and exponent > 1",
        ));
    }
    let mut cdf = Vec::with_capacity(max_degree - min_degree + 1);
    let mut acc = 0.0;
    for d in min_degree..=max_degree {
        acc += (d as f64).powf(-exponent);
        cdf.push(acc);
    }
    // stream 1 keeps these draws apart from the matching shuffle on the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut seq: Vec<usize> = (0..n)
        .map(|_| {
            let x = rng.gen::<f64>() * acc;
            min_degree + cdf.partition_point(|&c| c < x).min(cdf.len() - 1)
        })
        .collect();
    if seq.iter().sum::<usize>() % 2 == 1 {
        let i = seq.iter().position(|&d| d < max_degree).unwrap_or(0);
        if seq[i] < max_degree {
            seq[i] += 1;
        } else {
            seq[i] -= 1;
        }
    }
    Ok(seq)
}
