//! Non-learning seed selectors.
//!
//! Ranking baselines walk their ranking once and take every node whose cost
//! still fits the budget, skipping the ones that do not.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diffusion::SeedSet;
use crate::graph::{CommunityPartition, Graph, NodeAttrs};
use crate::{Error, Result};

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TOL: f64 = 1e-8;
pub const PAGERANK_MAX_ITER: usize = 200;

/// Per-node scores with nodes ordered by descending score, ties by
/// ascending id.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    scores: Vec<f64>,
    order: Vec<usize>,
}

impl ScoreTable {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("non-finite score".into()));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Ok(ScoreTable { scores, order })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, v: usize) -> f64 {
        self.scores[v]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Out-degree (plain degree for undirected graphs).
pub fn degree_table(g: &Graph) -> ScoreTable {
    let scores = (0..g.node_count())
        .map(|v| g.out_degree(v) as f64)
        .collect();
    ScoreTable::new(scores).expect("degrees are finite")
}

/// Power-iteration PageRank with uniform teleport. Dangling mass is spread
/// uniformly; iteration stops when the L1 change drops below `tol`.
pub fn pagerank(g: &Graph, damping: f64, tol: f64, max_iter: usize) -> Result<ScoreTable> {
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidParameter(format!(
            "damping {damping} not in [0, 1)"
        )));
    }
    let n = g.node_count();
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        let dangling: f64 = (0..n)
            .filter(|&v| g.out_degree(v) == 0)
            .map(|v| rank[v])
            .sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .in_neighbors(v)
                .iter()
                .map(|&u| rank[u] / g.out_degree(u) as f64)
                .sum();
            *slot = base + damping * inflow;
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < tol {
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    ScoreTable::new(rank.into_iter().map(|r| r / total).collect())
}

/// Walk `order` and keep every node that still fits the budget.
pub fn greedy_fill(
    order: impl IntoIterator<Item = usize>,
    attrs: &NodeAttrs,
    budget: f64,
) -> SeedSet {
    let mut seeds = SeedSet::empty();
    for v in order {
        if !seeds.contains(v) && seeds.fits(v, attrs, budget) {
            seeds = seeds.with(v, attrs);
        }
    }
    seeds
}

pub fn random_seeds<R: Rng + ?Sized>(
    g: &Graph,
    attrs: &NodeAttrs,
    budget: f64,
    rng: &mut R,
) -> SeedSet {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.shuffle(rng);
    greedy_fill(order, attrs, budget)
}

pub fn high_degree_seeds(g: &Graph, attrs: &NodeAttrs, budget: f64) -> SeedSet {
    greedy_fill(degree_table(g).order().iter().copied(), attrs, budget)
}

pub fn default_pagerank(g: &Graph) -> ScoreTable {
    pagerank(g, PAGERANK_DAMPING, PAGERANK_TOL, PAGERANK_MAX_ITER)
        .expect("default damping is valid")
}

pub fn pagerank_seeds(g: &Graph, attrs: &NodeAttrs, budget: f64) -> SeedSet {
    greedy_fill(default_pagerank(g).order().iter().copied(), attrs, budget)
}

/// Interleave per-community rankings so that after every pick the seed
/// set's community shares are as close as possible (L1) to the population
/// shares. Ties prefer the higher-scored candidate, then the lower community
/// index. Nodes that no longer fit the budget are skipped.
pub fn proportional_fill(
    table: &ScoreTable,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    budget: f64,
) -> SeedSet {
    const TIE: f64 = 1e-12;
    let k = parts.count();
    let n = attrs.len() as f64;
    let population: Vec<f64> = (0..k).map(|c| parts.members(c).len() as f64 / n).collect();
    let rankings: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            table
                .order()
                .iter()
                .copied()
                .filter(|&v| parts.label(v) == c)
                .collect()
        })
        .collect();
    let mut cursor = vec![0usize; k];
    let mut counts = vec![0usize; k];
    let mut seeds = SeedSet::empty();
    loop {
        // budget only shrinks, so a node that does not fit now never will
        let mut heads = Vec::with_capacity(k);
        for c in 0..k {
            while cursor[c] < rankings[c].len()
                && !seeds.fits(rankings[c][cursor[c]], attrs, budget)
            {
                cursor[c] += 1;
            }
            if cursor[c] < rankings[c].len() {
                heads.push((c, rankings[c][cursor[c]]));
            }
        }
        if heads.is_empty() {
            break;
        }
        let total = (seeds.len() + 1) as f64;
        let distance = |pick: usize| -> f64 {
            (0..k)
                .map(|c| {
                    let cnt = counts[c] + usize::from(c == pick);
                    (cnt as f64 / total - population[c]).abs()
                })
                .sum()
        };
        let mut best = heads[0];
        let mut best_dist = distance(best.0);
        for &(c, v) in &heads[1..] {
            let d = distance(c);
            let better = d < best_dist - TIE
                || ((d - best_dist).abs() <= TIE && table.score(v) > table.score(best.1));
            if better {
                best = (c, v);
                best_dist = d;
            }
        }
        let (c, v) = best;
        seeds = seeds.with(v, attrs);
        counts[c] += 1;
        cursor[c] += 1;
    }
    seeds
}

pub fn parity_seeds(
    g: &Graph,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    budget: f64,
) -> SeedSet {
    proportional_fill(&degree_table(g), attrs, parts, budget)
}

pub fn fair_pagerank_seeds(
    g: &Graph,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    budget: f64,
) -> SeedSet {
    proportional_fill(&default_pagerank(g), attrs, parts, budget)
}
