//! Profit and fairness metrics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diffusion::{self, rollouts, simulate_ic, InfluencedSet, SeedSet};
use crate::graph::{CommunityPartition, Graph, NodeAttrs};
use crate::par::Exec;
use crate::{Error, Result};

/// Fairness weight φ (reward shaping) and threshold τ (reporting only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessConfig {
    pub phi: f64,
    pub tau: f64,
}

impl FairnessConfig {
    pub fn new(phi: f64, tau: f64) -> Result<Self> {
        if !(phi >= 0.0 && phi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "fairness weight {phi} must be >= 0"
            )));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!(
                "threshold {tau} not in [0, 1]"
            )));
        }
        Ok(FairnessConfig { phi, tau })
    }
}

impl Default for FairnessConfig {
    fn default() -> Self {
        FairnessConfig { phi: 1.0, tau: 0.0 }
    }
}

/// Metrics of one diffusion outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub profit: f64,
    pub benefit: f64,
    pub cost: f64,
    pub ratios: Vec<f64>,
    pub fairness: f64,
    pub tau_ok: bool,
}

impl MetricReport {
    pub fn evaluate(
        influenced: &InfluencedSet,
        seeds: &SeedSet,
        attrs: &NodeAttrs,
        parts: &CommunityPartition,
        tau: f64,
    ) -> Self {
        let benefit = earned_benefit(influenced, attrs);
        let cost = selection_cost(seeds, attrs);
        let ratios: Vec<f64> = (0..parts.count())
            .map(|c| community_benefit_ratio(c, influenced, attrs, parts))
            .collect();
        let fairness = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        MetricReport {
            profit: benefit - cost,
            benefit,
            cost,
            ratios,
            fairness,
            tau_ok: fairness >= tau,
        }
    }
}

pub fn selection_cost(seeds: &SeedSet, attrs: &NodeAttrs) -> f64 {
    seeds.nodes().iter().map(|&v| attrs.cost(v)).sum()
}

pub fn earned_benefit(influenced: &InfluencedSet, attrs: &NodeAttrs) -> f64 {
    influenced.iter().map(|v| attrs.benefit(v)).sum()
}

/// Share of community `c`'s total benefit that was influenced, in `[0, 1]`.
pub fn community_benefit_ratio(
    c: usize,
    influenced: &InfluencedSet,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
) -> f64 {
    // same summation order as the cached total, so full coverage gives exactly 1
    let realized: f64 = parts
        .members(c)
        .iter()
        .filter(|&&v| influenced.contains(v))
        .map(|&v| attrs.benefit(v))
        .sum();
    realized / parts.total_benefit(c)
}

/// Smallest community benefit ratio.
pub fn maximin_fairness(
    influenced: &InfluencedSet,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
) -> f64 {
    (0..parts.count())
        .map(|c| community_benefit_ratio(c, influenced, attrs, parts))
        .fold(f64::INFINITY, f64::min)
}

/// `Π + φ·f` from a single IC rollout; profit and fairness come from the
/// same rollout.
pub fn shaped_reward<R: Rng + ?Sized>(
    g: &Graph,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    seeds: &SeedSet,
    phi: f64,
    rng: &mut R,
) -> f64 {
    let influenced = simulate_ic(g, seeds, rng);
    let profit = earned_benefit(&influenced, attrs) - selection_cost(seeds, attrs);
    profit + phi * maximin_fairness(&influenced, attrs, parts)
}

/// Marginal reward `R_t − R_prev`; negative values are kept.
pub fn marginal_reward(current: f64, previous: f64) -> f64 {
    current - previous
}

/// Monte Carlo summary of a seed set over `m` rollouts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub rollouts: usize,
    pub profit_mean: f64,
    pub profit_std: f64,
    pub benefit_mean: f64,
    pub spread_mean: f64,
    /// Mean of the per-rollout maximin fairness.
    pub fairness_mean: f64,
    pub tau_ok: bool,
    pub seed_size: usize,
    pub seed_cost: f64,
}

/// Evaluate `seeds` over `m` IC rollouts on streams `0..m` of `seed`. Reusing
/// `seed` across seed sets gives paired (common random number) comparisons.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_seed_set(
    exec: Exec,
    g: &Graph,
    attrs: &NodeAttrs,
    parts: &CommunityPartition,
    seeds: &SeedSet,
    m: usize,
    seed: u64,
    tau: f64,
) -> Result<McSummary> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one rollout".into()));
    }
    let reports = rollouts(exec, g, seeds, m, seed, |inf| {
        let r = MetricReport::evaluate(inf, seeds, attrs, parts, tau);
        (r.profit, r.benefit, inf.count(), r.fairness)
    });
    let profits: Vec<f64> = reports.iter().map(|r| r.0).collect();
    let benefits: Vec<f64> = reports.iter().map(|r| r.1).collect();
    let spreads: Vec<f64> = reports.iter().map(|r| r.2 as f64).collect();
    let fairness: Vec<f64> = reports.iter().map(|r| r.3).collect();
    let fairness_mean = diffusion::mean(&fairness);
    Ok(McSummary {
        rollouts: m,
        profit_mean: diffusion::mean(&profits),
        profit_std: diffusion::sample_std(&profits),
        benefit_mean: diffusion::mean(&benefits),
        spread_mean: diffusion::mean(&spreads),
        fairness_mean,
        tau_ok: fairness_mean >= tau,
        seed_size: seeds.len(),
        seed_cost: selection_cost(seeds, attrs),
    })
}
