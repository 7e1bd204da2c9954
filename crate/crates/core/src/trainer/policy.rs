//! Candidate scoring, ε-greedy selection, episodes and greedy inference.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;

use super::{TrainConfig, Transition};
use crate::diffusion::SeedSet;
use crate::embedding::NodeEmbeddings;
use crate::graph::Instance;
use crate::metrics::{marginal_reward, shaped_reward};
use crate::par::{self, Exec};
use crate::qnet::{encode_state, max_seeds, QNetwork};

/// What the Q-network needs to score candidates on one instance.
#[derive(Clone, Copy, Debug)]
pub struct StateContext<'a> {
    pub instance: &'a Instance,
    pub embeddings: &'a NodeEmbeddings,
    pub budget: f64,
    pub k_max: usize,
}

impl<'a> StateContext<'a> {
    pub fn new(instance: &'a Instance, embeddings: &'a NodeEmbeddings, budget: f64) -> Self {
        StateContext {
            instance,
            embeddings,
            budget,
            k_max: max_seeds(budget, instance.attrs.min_cost()),
        }
    }

    pub fn q_value(
        &self,
        net: &QNetwork,
        candidate: usize,
        seed_count: usize,
        remaining: f64,
    ) -> f64 {
        let s = encode_state(
            candidate,
            self.embeddings,
            seed_count,
            remaining,
            &self.instance.attrs,
            self.budget,
            self.k_max,
        );
        net.forward(s.as_slice())
    }

    /// Unselected, non-excluded nodes whose cost fits the remaining budget,
    /// in ascending id order.
    pub fn candidates(
        &self,
        chosen: &SeedSet,
        excluded: &BTreeSet<usize>,
        remaining: f64,
    ) -> Vec<usize> {
        let attrs = &self.instance.attrs;
        (0..attrs.len())
            .filter(|&v| {
                !chosen.contains(v)
                    && !excluded.contains(&v)
                    && attrs.cost(v) <= remaining
                    && chosen.fits(v, attrs, self.budget)
            })
            .collect()
    }

    /// Highest-scoring candidate and its value; ties go to the lowest id.
    pub fn best(
        &self,
        net: &QNetwork,
        candidates: &[usize],
        seed_count: usize,
        remaining: f64,
    ) -> Option<(usize, f64)> {
        let scores = par::map_slice(Exec::default(), candidates, |&v| {
            self.q_value(net, v, seed_count, remaining)
        });
        let mut best: Option<(usize, f64)> = None;
        for (&v, q) in candidates.iter().zip(scores) {
            if best.is_none_or(|(_, b)| q > b) {
                best = Some((v, q));
            }
        }
        best
    }
}

/// ε-greedy choice among budget-feasible candidates; `None` when there are
/// none.
pub fn epsilon_greedy_select<R: Rng + ?Sized>(
    net: &QNetwork,
    ctx: &StateContext<'_>,
    chosen: &SeedSet,
    excluded: &BTreeSet<usize>,
    epsilon: f64,
    remaining: f64,
    rng: &mut R,
) -> Option<usize> {
    let candidates = ctx.candidates(chosen, excluded, remaining);
    if candidates.is_empty() {
        return None;
    }
    if rng.random::<f64>() < epsilon {
        Some(candidates[rng.random_range(0..candidates.len())])
    } else {
        ctx.best(net, &candidates, chosen.len(), remaining)
            .map(|(v, _)| v)
    }
}

/// One training episode: build a seed set under the budget, collecting a
/// transition per selected node.
pub fn run_episode<R: Rng + ?Sized>(
    net: &QNetwork,
    instance_index: usize,
    instance: &Instance,
    embeddings: &Arc<NodeEmbeddings>,
    cfg: &TrainConfig,
    epsilon: f64,
    rng: &mut R,
) -> Vec<Transition> {
    let ctx = StateContext::new(instance, embeddings, cfg.budget);
    let attrs = &instance.attrs;
    let min_cost = attrs.min_cost();
    let mut chosen = SeedSet::empty();
    let mut excluded = BTreeSet::new();
    let mut remaining = cfg.budget;
    let mut previous = 0.0;
    let mut out = Vec::new();
    while remaining >= min_cost {
        let Some(action) =
            epsilon_greedy_select(net, &ctx, &chosen, &excluded, epsilon, remaining, rng)
        else {
            break;
        };
        if attrs.cost(action) > remaining {
            excluded.insert(action);
            continue;
        }
        let budget_before = remaining;
        remaining -= attrs.cost(action);
        let after = chosen.with(action, attrs);
        assert!(
            after.cost() <= cfg.budget && remaining >= 0.0,
            "budget violated: cost {} of {}, remaining {remaining}",
            after.cost(),
            cfg.budget
        );
        let total = shaped_reward(
            &instance.graph,
            attrs,
            &instance.parts,
            &after,
            cfg.phi,
            rng,
        );
        let reward = marginal_reward(total, previous);
        previous = total;
        out.push(Transition {
            instance: instance_index,
            before: chosen,
            action,
            reward,
            after: after.clone(),
            terminal: remaining <= 0.0,
            budget_before,
            budget_after: remaining,
            embeddings: Arc::clone(embeddings),
        });
        chosen = after;
    }
    out
}

/// Greedy (ε = 0) seed selection with a trained network. No rewards are
/// sampled.
pub fn greedy_seed_set(
    net: &QNetwork,
    instance: &Instance,
    embeddings: &NodeEmbeddings,
    budget: f64,
) -> SeedSet {
    let ctx = StateContext::new(instance, embeddings, budget);
    let attrs = &instance.attrs;
    let mut chosen = SeedSet::empty();
    let mut remaining = budget;
    let excluded = BTreeSet::new();
    while remaining >= attrs.min_cost() {
        let candidates = ctx.candidates(&chosen, &excluded, remaining);
        let Some((v, _)) = ctx.best(net, &candidates, chosen.len(), remaining) else {
            break;
        };
        remaining -= attrs.cost(v);
        chosen = chosen.with(v, attrs);
        assert!(chosen.cost() <= budget, "budget violated during inference");
    }
    chosen
}
