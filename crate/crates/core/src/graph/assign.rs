//! Seeded assignment of edge probabilities, node costs/benefits and
//! community labels.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::rng;
use crate::{Error, Result};

pub const TRIVALENCY_LEVELS: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbabilityModel {
    Uniform(f64),
    Trivalency,
}

impl fmt::Display for ProbabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityModel::Uniform(p) => write!(f, "uniform:{p}"),
            ProbabilityModel::Trivalency => write!(f, "trivalency"),
        }
    }
}

impl FromStr for ProbabilityModel {
    type Err = Error;

    /// `uniform` (p = 0.1), `uniform:<p>` or `trivalency`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            None if s == "uniform" => Ok(ProbabilityModel::Uniform(0.1)),
            None if s == "trivalency" => Ok(ProbabilityModel::Trivalency),
            Some(("uniform", p)) => p
                .parse()
                .map(ProbabilityModel::Uniform)
                .map_err(|_| Error::InvalidParameter(format!("bad uniform probability {p:?}"))),
            _ => Err(Error::InvalidParameter(format!(
                "unknown probability model {s:?}"
            ))),
        }
    }
}

/// Replace every edge probability according to `model`. For undirected graphs
/// both directions of an edge share one draw.
pub fn assign_edge_probabilities(g: &Graph, model: ProbabilityModel, seed: u64) -> Result<Graph> {
    let m = g.edge_count();
    let probs = match model {
        ProbabilityModel::Uniform(p) => {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "uniform probability {p} not in (0, 1]"
                )));
            }
            vec![p; m]
        }
        ProbabilityModel::Trivalency => {
            let mut rng = rng::seeded(seed);
            (0..m)
                .map(|_| TRIVALENCY_LEVELS[rng.random_range(0..TRIVALENCY_LEVELS.len())])
                .collect()
        }
    };
    g.with_edge_probabilities(&probs)
}

/// Per-node selection cost and benefit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeAttrs {
    cost: Vec<f64>,
    benefit: Vec<f64>,
}

impl NodeAttrs {
    pub fn new(cost: Vec<f64>, benefit: Vec<f64>) -> Result<Self> {
        if cost.len() != benefit.len() {
            return Err(Error::InvalidParameter(format!(
                "{} costs but {} benefits",
                cost.len(),
                benefit.len()
            )));
        }
        if let Some(v) = cost.iter().position(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "cost of node {v} must be positive"
            )));
        }
        if let Some(v) = benefit.iter().position(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "benefit of node {v} must be positive"
            )));
        }
        Ok(NodeAttrs { cost, benefit })
    }

    /// Same cost and benefit for every node.
    pub fn uniform(n: usize, cost: f64, benefit: f64) -> Result<Self> {
        NodeAttrs::new(vec![cost; n], vec![benefit; n])
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    pub fn cost(&self, v: usize) -> f64 {
        self.cost[v]
    }

    pub fn benefit(&self, v: usize) -> f64 {
        self.benefit[v]
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn benefits(&self) -> &[f64] {
        &self.benefit
    }

    pub fn min_cost(&self) -> f64 {
        self.cost.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total_cost(&self) -> f64 {
        self.cost.iter().sum()
    }

    pub fn total_benefit(&self) -> f64 {
        self.benefit.iter().sum()
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo > 0.0 && lo <= hi && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} range [{lo}, {hi}] must satisfy 0 < lo <= hi"
        )))
    }
}

/// Draw cost and benefit independently and uniformly from the given closed
/// ranges. Costs and benefits use separate streams of `seed`.
pub fn assign_node_attributes(
    g: &Graph,
    cost_range: (f64, f64),
    benefit_range: (f64, f64),
    seed: u64,
) -> Result<NodeAttrs> {
    check_range("cost", cost_range)?;
    check_range("benefit", benefit_range)?;
    let n = g.node_count();
    let draw = |(lo, hi): (f64, f64), stream: u64| -> Vec<f64> {
        let mut r = rng::stream(seed, stream);
        (0..n).map(|_| r.random_range(lo..=hi)).collect()
    };
    NodeAttrs::new(draw(cost_range, 0), draw(benefit_range, 1))
}

/// Disjoint communities covering every node, with cached benefit totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    totals: Vec<f64>,
}

impl CommunityPartition {
    /// Labels must use every index in `0..max+1` at least once.
    pub fn from_labels(labels: Vec<usize>, attrs: &NodeAttrs) -> Result<Self> {
        if labels.len() != attrs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} nodes",
                labels.len(),
                attrs.len()
            )));
        }
        let count = labels.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); count];
        for (v, &c) in labels.iter().enumerate() {
            members[c].push(v);
        }
        if let Some(c) = members.iter().position(Vec::is_empty) {
            return Err(Error::InvalidParameter(format!("community {c} is empty")));
        }
        let totals = members
            .iter()
            .map(|m| m.iter().map(|&v| attrs.benefit(v)).sum())
            .collect();
        Ok(CommunityPartition {
            labels,
            members,
            totals,
        })
    }

    /// Relabel arbitrary labels to `0..ℓ` in order of first appearance.
    pub fn from_sparse_labels(labels: &[usize], attrs: &NodeAttrs) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        let dense = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        CommunityPartition::from_labels(dense, attrs)
    }

    /// Everyone in one community.
    pub fn single(attrs: &NodeAttrs) -> Result<Self> {
        CommunityPartition::from_labels(vec![0; attrs.len()], attrs)
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn total_benefit(&self, c: usize) -> f64 {
        self.totals[c]
    }
}

/// Label a uniformly random `⌈fraction·n⌉` subset as community 0 (minority),
/// everything else community 1. Both communities are kept nonempty.
pub fn assign_communities(
    g: &Graph,
    attrs: &NodeAttrs,
    minority_fraction: f64,
    seed: u64,
) -> Result<CommunityPartition> {
    if !(minority_fraction > 0.0 && minority_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "minority fraction {minority_fraction} not in (0, 1)"
        )));
    }
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "two communities need at least two nodes".into(),
        ));
    }
    // guard against 0.2 * 100 landing a hair above 20
    let k = ((minority_fraction * n as f64) - 1e-9).ceil() as usize;
    let k = k.clamp(1, n - 1);
    let mut labels = vec![1usize; n];
    let mut r = rng::seeded(seed);
    for v in index::sample(&mut r, n, k) {
        labels[v] = 0;
    }
    CommunityPartition::from_labels(labels, attrs)
}
