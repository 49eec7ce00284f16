//! Immutable undirected graphs in compressed adjacency form.
//!
//! Edge lists follow the SNAP convention: one whitespace-separated pair of
//! integer ids per line, `#` starting a comment line. Ids are compacted to
//! `0..node_count` in ascending order of the original id, and the original
//! ids are kept so that a graph can be written back out unchanged.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Builds a simple undirected graph on `node_count` nodes. Self-loops and
    /// repeated edges (in either orientation) are dropped.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u != v {
                pairs.push((u as u32, v as u32));
                pairs.push((v as u32, u as u32));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Graph {
            offsets,
            targets,
            original_ids: (0..node_count as u64).collect(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Neighbors of `u`, sorted ascending.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).collect()
    }

    /// The id `u` had in the file it was loaded from.
    pub fn original_id(&self, u: usize) -> u64 {
        self.original_ids[u]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Iterates each undirected edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|u| self.degree(u))
            .max()
            .unwrap_or(0)
    }
}

/// Reads a SNAP-style edge list.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad node id {tok:?}: {e}"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let compact = |id: u64| ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (compact(u), compact(v))).collect();

    let mut g = Graph::from_edges(ids.len(), edges)?;
    g.original_ids = ids;
    Ok(g)
}

/// Writes the graph as an edge list using original ids, one line per
/// undirected edge.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{}\t{}", g.original_id(u), g.original_id(v))?;
    }
    Ok(())
}

/// Writes `compact_id<TAB>original_id` lines.
pub fn write_id_map<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# compact_id\toriginal_id")?;
    for (u, id) in g.original_ids.iter().enumerate() {
        writeln!(out, "{u}\t{id}")?;
    }
    Ok(())
}
