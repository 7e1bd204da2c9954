//! Running every algorithm over the budget grid on the test instances.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Algorithm, DatasetSpec, ExperimentConfig};
use crate::baselines;
use crate::diffusion::SeedSet;
use crate::graph::{self, Graph, Instance, InstancePool};
use crate::metrics::evaluate_seed_set;
use crate::par::Exec;
use crate::rng;
use crate::trainer::{self, load_checkpoint, Agent, TrainConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub algorithm: Algorithm,
    pub budget: f64,
    pub instance: usize,
    pub profit_mean: f64,
    pub profit_std: f64,
    pub fairness_mean: f64,
    pub tau_ok: bool,
    pub seed_size: usize,
    pub seed_cost: f64,
    /// Wall-clock seed-selection time; Monte Carlo evaluation excluded.
    pub seconds: f64,
}

/// Where the RL agent came from.
#[derive(Clone, Debug, PartialEq)]
pub enum AgentSource {
    Checkpoint(PathBuf),
    Trained { seconds: f64 },
}

#[derive(Clone, Debug)]
pub struct PreparedAgent {
    pub agent: Agent,
    pub config: TrainConfig,
    pub source: AgentSource,
}

pub fn load_source_graph(cfg: &ExperimentConfig) -> Result<Graph> {
    match &cfg.dataset {
        DatasetSpec::File(path) => graph::load_edge_list(path, cfg.directed),
        DatasetSpec::BarabasiAlbert { n, m } => {
            if cfg.directed {
                return Err(Error::Config("ba datasets are undirected".into()));
            }
            graph::barabasi_albert(*n, *m, cfg.seeds().graph)
        }
    }
}

pub fn build_pool(cfg: &ExperimentConfig) -> Result<InstancePool> {
    let source = load_source_graph(cfg)?;
    let overrides = cfg
        .attributes
        .as_ref()
        .map(graph::read_attribute_table)
        .transpose()?;
    graph::build_instance_pool(&source, &cfg.pool, cfg.seeds().pool, overrides.as_ref())
}

/// Load the configured checkpoint, or train on the pool's training
/// instances when none is configured.
pub fn prepare_agent(cfg: &ExperimentConfig, pool: &InstancePool) -> Result<PreparedAgent> {
    let expected = cfg.train_config();
    match &cfg.checkpoint {
        Some(path) => {
            let (agent, config) = load_checkpoint(path, Some(&expected))?;
            Ok(PreparedAgent {
                agent,
                config,
                source: AgentSource::Checkpoint(path.clone()),
            })
        }
        None => {
            let start = Instant::now();
            let outcome = trainer::train(&expected, pool)?;
            Ok(PreparedAgent {
                agent: outcome.agent,
                config: expected,
                source: AgentSource::Trained {
                    seconds: start.elapsed().as_secs_f64(),
                },
            })
        }
    }
}

pub fn select_seeds(
    algorithm: Algorithm,
    instance: &Instance,
    budget: f64,
    agent: Option<&Agent>,
    random_seed: u64,
) -> Result<SeedSet> {
    let (g, attrs, parts) = (&instance.graph, &instance.attrs, &instance.parts);
    let seeds = match algorithm {
        Algorithm::Rl4fpm => {
            let agent =
                agent.ok_or_else(|| Error::Config("rl4fpm needs a trained agent".into()))?;
            agent.infer_seed_set(instance, budget)?
        }
        Algorithm::Random => {
            baselines::random_seeds(g, attrs, budget, &mut rng::seeded(random_seed))
        }
        Algorithm::HighDegree => baselines::high_degree_seeds(g, attrs, budget),
        Algorithm::Pagerank => baselines::pagerank_seeds(g, attrs, budget),
        Algorithm::Parity => baselines::parity_seeds(g, attrs, parts, budget),
        Algorithm::FairPagerank => baselines::fair_pagerank_seeds(g, attrs, parts, budget),
    };
    assert!(
        seeds.cost() <= budget,
        "{algorithm} selected cost {} over budget {budget}",
        seeds.cost()
    );
    Ok(seeds)
}

/// Evaluate every configured algorithm on every test instance and budget.
/// All algorithms on one (instance, budget) cell share the same rollout
/// seed. Rows come back sorted by algorithm, budget, instance.
pub fn evaluate_pool(
    cfg: &ExperimentConfig,
    pool: &InstancePool,
    agent: Option<&Agent>,
) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    let mut rows = Vec::with_capacity(cfg.algorithms.len() * cfg.budgets.len() * pool.test.len());
    for inst in &pool.test {
        for (bi, &budget) in cfg.budgets.iter().enumerate() {
            for &algorithm in &cfg.algorithms {
                let start = Instant::now();
                let chosen = select_seeds(
                    algorithm,
                    inst,
                    budget,
                    agent,
                    seeds.random_cell(inst.id, bi),
                )?;
                let seconds = start.elapsed().as_secs_f64();
                let mc = evaluate_seed_set(
                    Exec::default(),
                    &inst.graph,
                    &inst.attrs,
                    &inst.parts,
                    &chosen,
                    cfg.mc_rollouts,
                    seeds.eval_cell(inst.id, bi),
                    cfg.tau,
                )?;
                rows.push(ExperimentResult {
                    algorithm,
                    budget,
                    instance: inst.id,
                    profit_mean: mc.profit_mean,
                    profit_std: mc.profit_std,
                    fairness_mean: mc.fairness_mean,
                    tau_ok: mc.tau_ok,
                    seed_size: mc.seed_size,
                    seed_cost: mc.seed_cost,
                    seconds,
                });
            }
        }
    }
    sort_results(&mut rows);
    Ok(rows)
}

pub fn sort_results(rows: &mut [ExperimentResult]) {
    rows.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.budget.total_cmp(&b.budget))
            .then(a.instance.cmp(&b.instance))
    });
}

/// Build the pool, obtain the agent if RL is requested, and evaluate.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    let pool = build_pool(cfg)?;
    let prepared = if cfg.algorithms.contains(&Algorithm::Rl4fpm) {
        Some(prepare_agent(cfg, &pool)?)
    } else {
        None
    };
    evaluate_pool(cfg, &pool, prepared.as_ref().map(|p| &p.agent))
}
