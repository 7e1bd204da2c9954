//! Independent Cascade diffusion.
//!
//! [`simulate_ic`] runs one cascade; [`rollouts`] runs many with one derived
//! RNG stream per rollout, so the result does not depend on whether the
//! rollouts run in parallel. [`exact_outcome`] enumerates live-edge worlds
//! and serves as a ground-truth oracle on tiny graphs.

use rand::Rng;

use crate::graph::{CommunityPartition, Graph, NodeAttrs};
use crate::metrics;
use crate::par::{self, Exec};
use crate::rng;
use crate::{Error, Result};

/// Sorted, duplicate-free set of seed nodes with its total cost.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeedSet {
    nodes: Vec<usize>,
    cost: f64,
}

impl SeedSet {
    pub fn empty() -> Self {
        SeedSet::default()
    }

    pub fn new(nodes: impl IntoIterator<Item = usize>, attrs: &NodeAttrs) -> Result<Self> {
        let mut nodes: Vec<usize> = nodes.into_iter().collect();
        nodes.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate seed node".into()));
        }
        if let Some(&v) = nodes.iter().find(|&&v| v >= attrs.len()) {
            return Err(Error::InvalidParameter(format!(
                "seed {v} out of range for {} nodes",
                attrs.len()
            )));
        }
        let cost = nodes.iter().map(|&v| attrs.cost(v)).sum();
        Ok(SeedSet { nodes, cost })
    }

    /// `self ∪ {v}`; `v` must not already be a member.
    pub fn with(&self, v: usize, attrs: &NodeAttrs) -> SeedSet {
        let pos = self
            .nodes
            .binary_search(&v)
            .expect_err("node already in seed set");
        let mut nodes = self.nodes.clone();
        nodes.insert(pos, v);
        let cost = nodes.iter().map(|&u| attrs.cost(u)).sum();
        SeedSet { nodes, cost }
    }

    /// Cost of `self ∪ {v}`, summed in the same order [`SeedSet::with`] uses.
    pub fn cost_with(&self, v: usize, attrs: &NodeAttrs) -> f64 {
        let pos = self.nodes.partition_point(|&u| u < v);
        let (lo, hi) = self.nodes.split_at(pos);
        lo.iter()
            .chain(std::iter::once(&v))
            .chain(hi)
            .map(|&u| attrs.cost(u))
            .sum()
    }

    /// Whether `v` can be added without `𝒞(S ∪ {v})` exceeding `budget`.
    pub fn fits(&self, v: usize, attrs: &NodeAttrs, budget: f64) -> bool {
        self.cost_with(v, attrs) <= budget
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// Total selection cost, summed in ascending node order.
    pub fn cost(&self) -> f64 {
        self.cost
    }
}

/// Membership vector of influenced nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluencedSet {
    active: Vec<bool>,
    count: usize,
}

impl InfluencedSet {
    pub fn none(n: usize) -> Self {
        InfluencedSet {
            active: vec![false; n],
            count: 0,
        }
    }

    pub fn all(n: usize) -> Self {
        InfluencedSet {
            active: vec![true; n],
            count: n,
        }
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = InfluencedSet::none(n);
        for v in nodes {
            s.insert(v);
        }
        s
    }

    pub fn from_mask(active: Vec<bool>) -> Self {
        let count = active.iter().filter(|&&a| a).count();
        InfluencedSet { active, count }
    }

    /// Returns whether `v` was newly added.
    pub fn insert(&mut self, v: usize) -> bool {
        if self.active[v] {
            false
        } else {
            self.active[v] = true;
            self.count += 1;
            true
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn universe(&self) -> usize {
        self.active.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
    }
}

/// One Independent Cascade rollout. Each round processes the newly activated
/// nodes in ascending id order; each tries its uninfluenced out-neighbours
/// once, in adjacency order, succeeding with the edge probability.
pub fn simulate_ic<R: Rng + ?Sized>(g: &Graph, seeds: &SeedSet, rng: &mut R) -> InfluencedSet {
    let mut influenced = InfluencedSet::none(g.node_count());
    let mut frontier: Vec<usize> = seeds.nodes().to_vec();
    for &v in &frontier {
        influenced.insert(v);
    }
    let mut next = Vec::new();
    while !frontier.is_empty() {
        for &u in &frontier {
            for (&v, &p) in g.out_neighbors(u).iter().zip(g.out_probs(u)) {
                if !influenced.contains(v) && rng.random::<f64>() < p {
                    influenced.insert(v);
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    influenced
}

/// Run `m` rollouts, rollout `i` on stream `i` of `seed`, mapping each
/// outcome through `f`. Output is in rollout order.
pub fn rollouts<T, F>(exec: Exec, g: &Graph, seeds: &SeedSet, m: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&InfluencedSet) -> T + Sync + Send,
{
    par::map_range(exec, m, |i| {
        let mut r = rng::stream(seed, i as u64);
        f(&simulate_ic(g, seeds, &mut r))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpreadEstimate {
    pub mean_spread: f64,
    pub mean_benefit: f64,
    /// Earned benefit of each rollout, in rollout order.
    pub benefits: Vec<f64>,
}

impl SpreadEstimate {
    /// Sample standard deviation of the per-rollout benefits (0 for m = 1).
    pub fn benefit_std(&self) -> f64 {
        sample_std(&self.benefits)
    }
}

pub fn estimate_spread_and_benefit(
    g: &Graph,
    attrs: &NodeAttrs,
    seeds: &SeedSet,
    m: usize,
    seed: u64,
) -> Result<SpreadEstimate> {
    estimate_spread_and_benefit_with(Exec::default(), g, attrs, seeds, m, seed)
}

pub fn estimate_spread_and_benefit_with(
    exec: Exec,
    g: &Graph,
    attrs: &NodeAttrs,
    seeds: &SeedSet,
    m: usize,
    seed: u64,
) -> Result<SpreadEstimate> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one rollout".into()));
    }
    let outcomes = rollouts(exec, g, seeds, m, seed, |inf| {
        (inf.count(), metrics::earned_benefit(inf, attrs))
    });
    let spread: usize = outcomes.iter().map(|o| o.0).sum();
    let benefits: Vec<f64> = outcomes.into_iter().map(|o| o.1).collect();
    Ok(SpreadEstimate {
        mean_spread: spread as f64 / m as f64,
        mean_benefit: mean(&benefits),
        benefits,
    })
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Bessel-corrected standard deviation; 0 for fewer than two samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Largest number of independent edge coins [`exact_outcome`] enumerates.
pub const MAX_EXACT_COINS: usize = 20;

/// Exact expectations under the IC model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOutcome {
    pub spread: f64,
    pub benefit: f64,
    /// Expected maximin fairness; 0 when no partition was given.
    pub fairness: f64,
}

/// Enumerate all live-edge worlds. Each logical edge is one coin (an
/// undirected edge can only ever carry influence in one direction, so one
/// coin per edge reproduces the cascade distribution).
pub fn exact_outcome(
    g: &Graph,
    attrs: &NodeAttrs,
    parts: Option<&CommunityPartition>,
    seeds: &SeedSet,
) -> Result<ExactOutcome> {
    let coins = g.edges();
    if coins.len() > MAX_EXACT_COINS {
        return Err(Error::GraphTooLarge {
            coins: coins.len(),
            max: MAX_EXACT_COINS,
        });
    }
    let n = g.node_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (c, &(u, v, _)) in coins.iter().enumerate() {
        adj[u].push((c, v));
        if !g.is_directed() {
            adj[v].push((c, u));
        }
    }
    let mut out = ExactOutcome {
        spread: 0.0,
        benefit: 0.0,
        fairness: 0.0,
    };
    let mut stack = Vec::new();
    for mask in 0u32..(1u32 << coins.len()) {
        let weight: f64 = coins
            .iter()
            .enumerate()
            .map(|(c, &(_, _, p))| if mask >> c & 1 == 1 { p } else { 1.0 - p })
            .product();
        if weight == 0.0 {
            continue;
        }
        let mut inf = InfluencedSet::none(n);
        stack.clear();
        for &s in seeds.nodes() {
            inf.insert(s);
            stack.push(s);
        }
        while let Some(u) = stack.pop() {
            for &(c, v) in &adj[u] {
                if mask >> c & 1 == 1 && inf.insert(v) {
                    stack.push(v);
                }
            }
        }
        out.spread += weight * inf.count() as f64;
        out.benefit += weight * metrics::earned_benefit(&inf, attrs);
        if let Some(parts) = parts {
            out.fairness += weight * metrics::maximin_fairness(&inf, attrs, parts);
        }
    }
    Ok(out)
}

/// Exact `E[β(S)] − 𝒞(S)`; only for graphs with at most
/// [`MAX_EXACT_COINS`] edges.
pub fn exact_expected_profit(g: &Graph, attrs: &NodeAttrs, seeds: &SeedSet) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    Ok(exact_outcome(g, attrs, None, seeds)?.benefit - seeds.cost())
}

/// Exact expected shaped objective `E[β] − 𝒞(S) + φ·E[f]`.
pub fn exact_shaped_objective(
    g: &Graph,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    seeds: &SeedSet,
    phi: f64,
) -> Result<f64> {
    let o = exact_outcome(g, attrs, Some(parts), seeds)?;
    Ok(o.benefit - seeds.cost() + phi * o.fairness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_node(p: f64) -> (Graph, NodeAttrs) {
        let g = Graph::from_edges(2, true, vec![(0, 1, p)]).unwrap();
        let a = NodeAttrs::new(vec![3.0, 3.0], vec![10.0, 10.0]).unwrap();
        (g, a)
    }

    #[test]
    fn empty_seed_set_influences_nothing() {
        let (g, a) = two_node(1.0);
        let inf = simulate_ic(&g, &SeedSet::empty(), &mut rng::seeded(0));
        assert_eq!(inf.count(), 0);
        let est = estimate_spread_and_benefit(&g, &a, &SeedSet::empty(), 10, 0).unwrap();
        assert_eq!(est.mean_spread, 0.0);
        assert_eq!(est.mean_benefit, 0.0);
    }

    #[test]
    fn certain_edges_reach_everything_reachable() {
        let g = Graph::from_edges(
            5,
            true,
            vec![(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (2, 0, 1.0)],
        )
        .unwrap();
        let a = NodeAttrs::uniform(5, 1.0, 1.0).unwrap();
        let s = SeedSet::new([1], &a).unwrap();
        let inf = simulate_ic(&g, &s, &mut rng::seeded(1));
        assert_eq!(inf.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn connected_certain_graph_spread_is_n() {
        let g = Graph::from_edges(6, false, (0..5).map(|i| (i, i + 1, 1.0))).unwrap();
        let a = NodeAttrs::uniform(6, 1.0, 2.0).unwrap();
        let s = SeedSet::new([3], &a).unwrap();
        let est = estimate_spread_and_benefit(&g, &a, &s, 20, 9).unwrap();
        assert_eq!(est.mean_spread, 6.0);
        assert_eq!(est.mean_benefit, 12.0);
    }

    #[test]
    fn bernoulli_edge_frequency() {
        let (g, a) = two_node(0.5);
        let s = SeedSet::new([0], &a).unwrap();
        let hits = rollouts(Exec::default(), &g, &s, 10_000, 123, |inf| {
            inf.contains(1) as usize
        });
        let frac = hits.iter().sum::<usize>() as f64 / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.02, "fraction {frac}");
    }

    #[test]
    fn two_node_expected_benefit() {
        let (g, a) = two_node(0.5);
        let s = SeedSet::new([0], &a).unwrap();
        let est = estimate_spread_and_benefit(&g, &a, &s, 10_000, 5).unwrap();
        assert!(
            (est.mean_benefit - 15.0).abs() <= 0.5,
            "{}",
            est.mean_benefit
        );
        assert_eq!(est.benefits.len(), 10_000);
    }

    #[test]
    fn exact_two_node_profit_is_twelve() {
        let (g, a) = two_node(0.5);
        let s = SeedSet::new([0], &a).unwrap();
        assert_abs_diff_eq!(
            exact_expected_profit(&g, &a, &s).unwrap(),
            12.0,
            epsilon = 1e-12
        );
        assert_eq!(
            exact_expected_profit(&g, &a, &SeedSet::empty()).unwrap(),
            0.0
        );
    }

    #[test]
    fn exact_triangle() {
        let g = Graph::from_edges(3, false, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let a = NodeAttrs::uniform(3, 1.0, 1.0).unwrap();
        for v in 0..3 {
            let s = SeedSet::new([v], &a).unwrap();
            assert_abs_diff_eq!(
                exact_expected_profit(&g, &a, &s).unwrap(),
                2.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn exact_rejects_large_graphs() {
        let g = Graph::from_edges(30, true, (0..29).map(|i| (i, i + 1, 0.5))).unwrap();
        let a = NodeAttrs::uniform(30, 1.0, 1.0).unwrap();
        let s = SeedSet::new([0], &a).unwrap();
        assert!(matches!(
            exact_expected_profit(&g, &a, &s),
            Err(Error::GraphTooLarge { coins: 29, .. })
        ));
    }

    #[test]
    fn undirected_single_coin_matches_hand_value() {
        // path a - b - c, seed a: E[spread] = 1 + p + p^2
        let p = 0.3;
        let g = Graph::from_edges(3, false, vec![(0, 1, p), (1, 2, p)]).unwrap();
        let a = NodeAttrs::uniform(3, 1.0, 1.0).unwrap();
        let s = SeedSet::new([0], &a).unwrap();
        let o = exact_outcome(&g, &a, None, &s).unwrap();
        assert_abs_diff_eq!(o.spread, 1.0 + p + p * p, epsilon = 1e-12);
    }

    #[test]
    fn rollouts_are_mode_independent() {
        let g = crate::graph::barabasi_albert(200, 3, 3).unwrap();
        let g = crate::graph::assign_edge_probabilities(
            &g,
            crate::graph::ProbabilityModel::Uniform(0.2),
            0,
        )
        .unwrap();
        let a = NodeAttrs::uniform(200, 1.0, 1.0).unwrap();
        let s = SeedSet::new([0, 5, 17], &a).unwrap();
        let seq = estimate_spread_and_benefit_with(Exec::Sequential, &g, &a, &s, 300, 8).unwrap();
        let par = estimate_spread_and_benefit_with(Exec::Parallel, &g, &a, &s, 300, 8).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn seed_set_validation() {
        let a = NodeAttrs::new(vec![3.0, 7.0, 1.0], vec![1.0; 3]).unwrap();
        assert!(SeedSet::new([0, 0], &a).is_err());
        assert!(SeedSet::new([3], &a).is_err());
        let s = SeedSet::new([1, 0], &a).unwrap();
        assert_eq!(s.nodes(), &[0, 1]);
        assert_eq!(s.cost(), 10.0);
        assert_eq!(s.cost_with(2, &a), 11.0);
        assert!(s.fits(2, &a, 11.0));
        assert!(!s.fits(2, &a, 10.5));
        let t = s.with(2, &a);
        assert_eq!(t.nodes(), &[0, 1, 2]);
        assert_eq!(t.cost(), 11.0);
    }

    #[test]
    fn std_of_single_sample_is_zero() {
        assert_eq!(sample_std(&[4.0]), 0.0);
        assert_abs_diff_eq!(sample_std(&[1.0, 3.0]), 2f64.sqrt(), epsilon = 1e-12);
    }
}
