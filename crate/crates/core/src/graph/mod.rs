//! Graph storage and instance construction.
//!
//! [`Graph`] is an immutable compressed adjacency structure with dense
//! `0..n` node ids. Undirected graphs store every edge in both directions.

mod assign;
mod io;
mod sample;

pub use assign::{
    assign_communities, assign_edge_probabilities, assign_node_attributes, CommunityPartition,
    NodeAttrs, ProbabilityModel,
};
pub use io::{
    load_edge_list, parse_edge_list, read_attribute_table, write_attribute_table, write_edge_list,
    AttributeRecord, AttributeTable,
};
pub use sample::{
    barabasi_albert, build_instance_pool, sample_subgraph, Instance, InstancePool, PoolConfig,
    RESTART_PROBABILITY,
};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    directed: bool,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    out_probs: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    in_probs: Vec<f64>,
    original_ids: Vec<u64>,
}

fn csr(n: usize, arcs: &[(usize, usize, f64)]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    // `arcs` must be sorted by (source, target).
    let mut offsets = vec![0usize; n + 1];
    for &(u, _, _) in arcs {
        offsets[u + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let targets = arcs.iter().map(|a| a.1).collect();
    let probs = arcs.iter().map(|a| a.2).collect();
    (offsets, targets, probs)
}

impl Graph {
    /// Build a graph on `n` nodes. Self-loops are dropped, duplicate edges
    /// collapse to their first occurrence, and for undirected graphs `(u, v)`
    /// and `(v, u)` are the same edge.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut canon = Vec::new();
        for (u, v, p) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) probability {p} not in (0, 1]"
                )));
            }
            if u == v {
                continue;
            }
            let (a, b) = if directed || u < v { (u, v) } else { (v, u) };
            canon.push((a, b, p));
        }
        // stable: the first occurrence of a duplicate survives
        canon.sort_by_key(|&(u, v, _)| (u, v));
        canon.dedup_by_key(|&mut (u, v, _)| (u, v));

        let mut out = canon.clone();
        if !directed {
            out.extend(canon.iter().map(|&(u, v, p)| (v, u, p)));
            out.sort_by_key(|&(u, v, _)| (u, v));
        }
        let (out_offsets, out_targets, out_probs) = csr(n, &out);
        let (in_offsets, in_sources, in_probs) = if directed {
            let mut rev: Vec<_> = out.iter().map(|&(u, v, p)| (v, u, p)).collect();
            rev.sort_by_key(|&(u, v, _)| (u, v));
            csr(n, &rev)
        } else {
            (out_offsets.clone(), out_targets.clone(), out_probs.clone())
        };
        Ok(Graph {
            directed,
            out_offsets,
            out_targets,
            out_probs,
            in_offsets,
            in_sources,
            in_probs,
            original_ids: (0..n as u64).collect(),
        })
    }

    /// Attach original (pre-remapping) node ids for reporting.
    pub fn with_original_ids(mut self, ids: Vec<u64>) -> Result<Graph> {
        if ids.len() != self.node_count() {
            return Err(Error::InvalidParameter(format!(
                "{} original ids for {} nodes",
                ids.len(),
                self.node_count()
            )));
        }
        self.original_ids = ids;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Stored arcs; an undirected edge counts twice.
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Logical edges; an undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.arc_count()
        } else {
            self.arc_count() / 2
        }
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn out_probs(&self, v: usize) -> &[f64] {
        &self.out_probs[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// In-neighbours; equal to the out-neighbours for undirected graphs.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn in_probs(&self, v: usize) -> &[f64] {
        &self.in_probs[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn original_id(&self, v: usize) -> u64 {
        self.original_ids[v]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Probability of arc `u -> v`, if present.
    pub fn probability(&self, u: usize, v: usize) -> Option<f64> {
        let nbrs = self.out_neighbors(u);
        nbrs.binary_search(&v).ok().map(|i| self.out_probs(u)[i])
    }

    /// All stored arcs `(u, v, p)` in (u, v) order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.out_neighbors(u)
                .iter()
                .zip(self.out_probs(u))
                .map(move |(&v, &p)| (u, v, p))
        })
    }

    /// Logical edges: every arc for directed graphs, `u < v` arcs otherwise.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.arcs()
            .filter(|&(u, v, _)| self.directed || u < v)
            .collect()
    }

    /// Same topology with per-edge probabilities replaced, in [`Graph::edges`]
    /// order.
    pub fn with_edge_probabilities(&self, probs: &[f64]) -> Result<Graph> {
        let edges = self.edges();
        if probs.len() != edges.len() {
            return Err(Error::InvalidParameter(format!(
                "{} probabilities for {} edges",
                probs.len(),
                edges.len()
            )));
        }
        let g = Graph::from_edges(
            self.node_count(),
            self.directed,
            edges.iter().zip(probs).map(|(&(u, v, _), &p)| (u, v, p)),
        )?;
        g.with_original_ids(self.original_ids.clone())
    }

    /// Subgraph induced by `nodes`, relabelled densely in ascending order of
    /// the given ids. Original ids are carried over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut keep: Vec<usize> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut index = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.node_count() {
                return Err(Error::InvalidParameter(format!("node {old} out of range")));
            }
            index[old] = new;
        }
        let edges = self
            .edges()
            .into_iter()
            .filter(|&(u, v, _)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|(u, v, p)| (index[u], index[v], p));
        let g = Graph::from_edges(keep.len(), self.directed, edges)?;
        let ids = keep.iter().map(|&v| self.original_ids[v]).collect();
        g.with_original_ids(ids)
    }
}
