//! The two-stage input: a core set, its neighborhood, and per-neighbor
//! weights and realization probabilities.
//!
//! Neighbors are stored in *rank order*: sorted by non-increasing weight,
//! ties broken by ascending node id. A neighbor's position in that order is
//! its rank, and every per-core incidence list is the ascending list of its
//! neighbors' ranks. Merging two incidence lists is therefore an integer
//! merge, and any prefix of a merged list is a prefix of the weight order.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::knapsack::{Item, SortedItemList};

pub const DUMP_HEADER: &str = "#adaptive-seed-instance v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    core: Vec<usize>,
    neighbors: Vec<usize>,
    weight: Vec<f64>,
    prob: Vec<f64>,
    degree: Vec<usize>,
    incidence: Vec<Vec<u32>>,
    parents: Vec<Vec<u32>>,
}

/// Options for [`build_instance`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Drop core members from the neighbor set even when they are adjacent
    /// to another core member.
    pub exclude_core_from_neighbors: bool,
}

/// Extracts the instance induced by `core` on `g`. `weights` and `probs`
/// are indexed by graph node.
pub fn build_instance(
    g: &Graph,
    core: &[usize],
    weights: &[f64],
    probs: &[f64],
    opts: BuildOptions,
) -> Result<Instance> {
    let n = g.node_count();
    if weights.len() != n || probs.len() != n {
        return Err(Error::param(format!(
            "weight/probability vectors must have {n} entries"
        )));
    }
    let mut core: Vec<usize> = core.to_vec();
    core.sort_unstable();
    core.dedup();
    if let Some(&bad) = core.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange {
            node: bad,
            node_count: n,
        });
    }
    let mut in_core = vec![false; n];
    for &v in &core {
        in_core[v] = true;
    }

    let mut edges = Vec::new();
    for (ci, &v) in core.iter().enumerate() {
        for &u in g.neighbors(v) {
            let u = u as usize;
            if opts.exclude_core_from_neighbors && in_core[u] {
                continue;
            }
            edges.push((ci, u));
        }
    }
    assemble(core, edges, |u| (weights[u], probs[u], g.degree(u)))
}

impl Instance {
    /// Builds an instance from explicit `(core_id, neighbor_id, weight,
    /// probability)` incidences. Core nodes without incidences can be passed
    /// in `extra_core`. A neighbor's degree is taken to be its number of core
    /// parents.
    pub fn from_incidences(
        rows: &[(usize, usize, f64, f64)],
        extra_core: &[usize],
    ) -> Result<Instance> {
        let mut attrs: HashMap<usize, (f64, f64)> = HashMap::new();
        let mut core: Vec<usize> = rows
            .iter()
            .map(|r| r.0)
            .chain(extra_core.iter().copied())
            .collect();
        core.sort_unstable();
        core.dedup();
        let mut parent_count: HashMap<usize, usize> = HashMap::new();
        let mut edges = Vec::with_capacity(rows.len());
        for &(c, u, w, p) in rows {
            match attrs.get(&u) {
                Some(&(w0, p0)) if w0 != w || p0 != p => {
                    return Err(Error::param(format!(
                        "neighbor {u} has inconsistent weight/probability"
                    )))
                }
                _ => {
                    attrs.insert(u, (w, p));
                }
            }
            let ci = core.binary_search(&c).expect("core collected above");
            edges.push((ci, u));
            *parent_count.entry(u).or_default() += 1;
        }
        assemble(core, edges, |u| {
            let (w, p) = attrs[&u];
            (w, p, parent_count[&u])
        })
    }

    pub fn core_len(&self) -> usize {
        self.core.len()
    }

    pub fn neighbor_len(&self) -> usize {
        self.neighbors.len()
    }

    /// Node ids of the core set, ascending. Core index `i` refers to `core_ids()[i]`.
    pub fn core_ids(&self) -> &[usize] {
        &self.core
    }

    pub fn core_index(&self, node: usize) -> Option<usize> {
        self.core.binary_search(&node).ok()
    }

    /// Node ids of the neighbors in rank order.
    pub fn neighbor_ids(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn neighbor_degrees(&self) -> &[usize] {
        &self.degree
    }

    /// Ranks of the neighbors of core index `i`, ascending (weight order).
    pub fn incidence(&self, i: usize) -> &[u32] {
        &self.incidence[i]
    }

    /// Core indices adjacent to the neighbor of rank `r`, ascending.
    pub fn parents(&self, r: usize) -> &[u32] {
        &self.parents[r]
    }

    pub fn item(&self, r: usize) -> Item {
        Item {
            id: self.neighbors[r],
            weight: self.weight[r],
            prob: self.prob[r],
        }
    }

    /// Replaces the realization probabilities (indexed by rank).
    pub fn set_probs(&mut self, probs: Vec<f64>) -> Result<()> {
        if probs.len() != self.neighbors.len() {
            return Err(Error::param("probability vector length mismatch"));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param(format!("probability {p} outside [0,1]")));
        }
        self.prob = probs;
        Ok(())
    }

    /// Ranks in N(S) for a set of core indices, ascending.
    pub fn neighborhood(&self, seeds: &[usize]) -> Vec<u32> {
        let mut seen = vec![false; self.neighbors.len()];
        let mut out = Vec::new();
        for &i in seeds {
            for &r in &self.incidence[i] {
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    out.push(r);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn item_list(&self, ranks: &[u32]) -> SortedItemList {
        SortedItemList::from_sorted(ranks.iter().map(|&r| self.item(r as usize)).collect())
            .expect("rank order is weight order")
    }

    /// Sum of p_u·w_u over all neighbors.
    pub fn total_expected_weight(&self) -> f64 {
        self.prob.iter().zip(&self.weight).map(|(p, w)| p * w).sum()
    }

    pub fn min_positive_prob(&self) -> Option<f64> {
        self.prob
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Sub-instance keeping only the given core indices and their neighbors.
    pub fn restrict_core(&self, keep: &[usize]) -> Instance {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let core: Vec<usize> = keep.iter().map(|&i| self.core[i]).collect();
        let mut edges = Vec::new();
        for (ci, &i) in keep.iter().enumerate() {
            for &r in &self.incidence[i] {
                edges.push((ci, r as usize));
            }
        }
        let sub = assemble(core, edges, |r| {
            (self.weight[r], self.prob[r], self.degree[r])
        })
        .expect("restriction of a valid instance");
        // assemble keyed neighbors by rank; map them back to node ids
        Instance {
            neighbors: sub.neighbors.iter().map(|&r| self.neighbors[r]).collect(),
            ..sub
        }
    }

    /// Writes the instance in the tab-separated dump format.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{DUMP_HEADER}")?;
        for (i, list) in self.incidence.iter().enumerate() {
            for &r in list {
                let r = r as usize;
                writeln!(
                    out,
                    "{}\t{}\t{:?}\t{:?}",
                    self.core[i], self.neighbors[r], self.weight[r], self.prob[r]
                )?;
            }
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(reader: R) -> Result<Instance> {
        let mut lines = reader.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == DUMP_HEADER => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header {DUMP_HEADER:?}"),
                })
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected 4 tab-separated fields".into(),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: line_no,
                message: format!("bad {what}"),
            };
            let c = fields[0].trim().parse().map_err(|_| bad("core id"))?;
            let u = fields[1].trim().parse().map_err(|_| bad("neighbor id"))?;
            let w: f64 = fields[2].trim().parse().map_err(|_| bad("weight"))?;
            let p: f64 = fields[3].trim().parse().map_err(|_| bad("probability"))?;
            if !(w >= 0.0 && w.is_finite()) || !(0.0..=1.0).contains(&p) {
                return Err(bad("weight/probability range"));
            }
            rows.push((c, u, w, p));
        }
        Instance::from_incidences(&rows, &[])
    }
}

/// Shared constructor: `edges` are `(core index, neighbor key)`, `attr`
/// returns `(weight, probability, degree)` for a neighbor key. Neighbor keys
/// must be node ids (ties in weight are broken by key).
fn assemble<F>(core: Vec<usize>, mut edges: Vec<(usize, usize)>, attr: F) -> Result<Instance>
where
    F: Fn(usize) -> (f64, f64, usize),
{
    edges.sort_unstable();
    edges.dedup();
    let mut keys: Vec<usize> = edges.iter().map(|&(_, u)| u).collect();
    keys.sort_unstable();
    keys.dedup();

    let mut info: Vec<(usize, f64, f64, usize)> = Vec::with_capacity(keys.len());
    for &u in &keys {
        let (w, p, d) = attr(u);
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::param(format!(
                "weight of node {u} must be finite and non-negative"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!(
                "probability of node {u} outside [0,1]"
            )));
        }
        info.push((u, w, p, d));
    }
    info.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut rank_of: HashMap<usize, u32> = HashMap::with_capacity(info.len());
    for (r, &(u, ..)) in info.iter().enumerate() {
        rank_of.insert(u, r as u32);
    }
    let mut incidence = vec![Vec::new(); core.len()];
    let mut parents = vec![Vec::new(); info.len()];
    for &(ci, u) in &edges {
        let r = rank_of[&u];
        incidence[ci].push(r);
        parents[r as usize].push(ci as u32);
    }
    for list in incidence.iter_mut() {
        list.sort_unstable();
    }
    for list in parents.iter_mut() {
        list.sort_unstable();
    }
    Ok(Instance {
        core,
        neighbors: info.iter().map(|x| x.0).collect(),
        weight: info.iter().map(|x| x.1).collect(),
        prob: info.iter().map(|x| x.2).collect(),
        degree: info.iter().map(|x| x.3).collect(),
        incidence,
        parents,
    })
}

/// Degree statistics contrasting a core set with its neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct ParadoxStats {
    pub mean_degree_core: f64,
    pub mean_degree_neighbors: f64,
    /// `(degree, fraction of core nodes with degree <= it)`, ascending.
    pub core_cdf: Vec<(usize, f64)>,
    pub neighbor_cdf: Vec<(usize, f64)>,
}

pub fn paradox_stats(g: &Graph, core: &[usize]) -> Result<ParadoxStats> {
    if core.is_empty() {
        return Err(Error::param("core set must be non-empty"));
    }
    let zeros = vec![0.0; g.node_count()];
    let inst = build_instance(g, core, &zeros, &zeros, BuildOptions::default())?;
    let core_deg: Vec<usize> = inst.core_ids().iter().map(|&v| g.degree(v)).collect();
    let nb_deg: Vec<usize> = inst.neighbor_ids().iter().map(|&u| g.degree(u)).collect();
    Ok(ParadoxStats {
        mean_degree_core: mean(&core_deg),
        mean_degree_neighbors: mean(&nb_deg),
        core_cdf: cdf(core_deg),
        neighbor_cdf: cdf(nb_deg),
    })
}

fn mean(xs: &[usize]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<usize>() as f64 / xs.len() as f64
    }
}

fn cdf(mut xs: Vec<usize>) -> Vec<(usize, f64)> {
    xs.sort_unstable();
    let n = xs.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &d) in xs.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == d => last.1 = frac,
            _ => out.push((d, frac)),
        }
    }
    out
}
