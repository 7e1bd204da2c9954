//! Subgraph sampling, synthetic graphs and train/test instance pools.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    assign_communities, assign_edge_probabilities, assign_node_attributes, AttributeTable,
    CommunityPartition, Graph, NodeAttrs, ProbabilityModel,
};
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

pub const RESTART_PROBABILITY: f64 = 0.15;

/// Walk steps without a new node before the walk jumps elsewhere.
fn stall_limit(target: usize) -> usize {
    1000 + 10 * target
}

/// Induced subgraph on the first `target` distinct nodes visited by a random
/// walk with restart. The walk moves over the undirected view of `g` and
/// jumps to a fresh unvisited node when it stalls.
pub fn sample_subgraph(g: &Graph, target: usize, seed: u64) -> Result<Graph> {
    let n = g.node_count();
    if target == 0 || target > n {
        return Err(Error::InvalidParameter(format!(
            "cannot sample {target} nodes from a graph with {n}"
        )));
    }
    if target == n {
        return Ok(g.clone());
    }
    let mut r = rng::seeded(seed);
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(target);

    let fresh_node = |r: &mut rng::SimRng, visited: &[bool]| -> usize {
        for _ in 0..64 {
            let v = r.random_range(0..n);
            if !visited[v] {
                return v;
            }
        }
        let unvisited: Vec<usize> = (0..n).filter(|&v| !visited[v]).collect();
        unvisited[r.random_range(0..unvisited.len())]
    };

    let mut start = fresh_node(&mut r, &visited);
    let mut current = start;
    visited[start] = true;
    order.push(start);
    let mut idle = 0usize;
    while order.len() < target {
        let out = g.out_neighbors(current);
        let inn = if g.is_directed() {
            g.in_neighbors(current)
        } else {
            &[][..]
        };
        let deg = out.len() + inn.len();
        if deg == 0 || idle > stall_limit(target) {
            start = fresh_node(&mut r, &visited);
            current = start;
            visited[start] = true;
            order.push(start);
            idle = 0;
            continue;
        }
        if r.random::<f64>() < RESTART_PROBABILITY {
            current = start;
        } else {
            let i = r.random_range(0..deg);
            current = if i < out.len() {
                out[i]
            } else {
                inn[i - out.len()]
            };
        }
        if visited[current] {
            idle += 1;
        } else {
            visited[current] = true;
            order.push(current);
            idle = 0;
        }
    }
    g.induced_subgraph(&order)
}

/// Undirected Barabási–Albert graph: a clique on `m + 1` nodes, then every
/// new node attaches to `m` distinct existing nodes chosen proportionally to
/// degree. Edge probabilities are 1 until assigned.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "Barabási–Albert needs n > m >= 1 (n={n}, m={m})"
        )));
    }
    let mut r = rng::seeded(seed);
    let mut edges = Vec::with_capacity(n * m);
    // every endpoint once per incident edge, so a uniform pick is degree-proportional
    let mut ends = Vec::with_capacity(2 * n * m);
    for u in 0..=m {
        for v in (u + 1)..=m {
            edges.push((u, v, 1.0));
            ends.push(u);
            ends.push(v);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in (m + 1)..n {
        chosen.clear();
        while chosen.len() < m {
            let u = ends[r.random_range(0..ends.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            edges.push((u, v, 1.0));
            ends.push(u);
            ends.push(v);
        }
    }
    Graph::from_edges(n, false, edges)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub nodes_per_instance: usize,
    pub probability: ProbabilityModel,
    pub cost_range: (f64, f64),
    pub benefit_range: (f64, f64),
    pub minority_fraction: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            n_train: 12,
            n_test: 8,
            nodes_per_instance: 500,
            probability: ProbabilityModel::Uniform(0.1),
            cost_range: (1.0, 100.0),
            benefit_range: (1.0, 100.0),
            minority_fraction: 0.2,
        }
    }
}

/// One sampled problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: usize,
    pub seed: u64,
    pub graph: Graph,
    pub attrs: NodeAttrs,
    pub parts: CommunityPartition,
}

impl Instance {
    pub fn new(
        id: usize,
        graph: Graph,
        attrs: NodeAttrs,
        parts: CommunityPartition,
    ) -> Result<Self> {
        if attrs.len() != graph.node_count() || parts.labels().len() != graph.node_count() {
            return Err(Error::InvalidParameter(format!(
                "instance {id}: attribute/community sizes do not match {} nodes",
                graph.node_count()
            )));
        }
        Ok(Instance {
            id,
            seed: 0,
            graph,
            attrs,
            parts,
        })
    }

    /// Sample instance `id` from `source` using `seed`.
    pub fn sample(
        id: usize,
        source: &Graph,
        cfg: &PoolConfig,
        seed: u64,
        overrides: Option<&AttributeTable>,
    ) -> Result<Self> {
        let sub = sample_subgraph(source, cfg.nodes_per_instance, derive_seed(seed, 0))?;
        let graph = assign_edge_probabilities(&sub, cfg.probability, derive_seed(seed, 1))?;
        let (attrs, parts) = match overrides {
            None => {
                let attrs = assign_node_attributes(
                    &graph,
                    cfg.cost_range,
                    cfg.benefit_range,
                    derive_seed(seed, 2),
                )?;
                let parts = assign_communities(
                    &graph,
                    &attrs,
                    cfg.minority_fraction,
                    derive_seed(seed, 3),
                )?;
                (attrs, parts)
            }
            Some(table) => {
                let mut cost = Vec::with_capacity(graph.node_count());
                let mut benefit = Vec::with_capacity(graph.node_count());
                let mut labels = Vec::with_capacity(graph.node_count());
                for &id in graph.original_ids() {
                    let rec = table.get(id).ok_or_else(|| {
                        Error::InvalidParameter(format!("node {id} missing from attribute file"))
                    })?;
                    cost.push(rec.cost);
                    benefit.push(rec.benefit);
                    labels.push(rec.community);
                }
                let attrs = NodeAttrs::new(cost, benefit)?;
                let parts = CommunityPartition::from_sparse_labels(&labels, &attrs)?;
                (attrs, parts)
            }
        };
        Ok(Instance {
            id,
            seed,
            graph,
            attrs,
            parts,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstancePool {
    pub train: Vec<Instance>,
    pub test: Vec<Instance>,
    pub seed: u64,
}

/// Sample `n_train + n_test` instances with seeds derived from `base_seed`
/// and the instance index; training instances take ids `0..n_train`.
pub fn build_instance_pool(
    g: &Graph,
    cfg: &PoolConfig,
    base_seed: u64,
    overrides: Option<&AttributeTable>,
) -> Result<InstancePool> {
    if cfg.n_train == 0 || cfg.n_test == 0 {
        return Err(Error::InvalidParameter(
            "instance pool needs at least one train and one test instance".into(),
        ));
    }
    let total = cfg.n_train + cfg.n_test;
    let mut all = (0..total)
        .map(|i| Instance::sample(i, g, cfg, derive_seed(base_seed, i as u64), overrides))
        .collect::<Result<Vec<_>>>()?;
    let test = all.split_off(cfg.n_train);
    Ok(InstancePool {
        train: all,
        test,
        seed: base_seed,
    })
}
