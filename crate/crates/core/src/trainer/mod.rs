//! Deep Q-learning for fairness-aware profit maximization (RL4FPM).
//!
//! Each episode samples a training instance, embeds it once, and grows a
//! seed set with an ε-greedy policy over budget-feasible candidates. Rewards
//! are marginal single-rollout shaped returns. Every `update_period`
//! episodes one Adam step is taken on a uniform minibatch from the replay
//! buffer, bootstrapping from the same network.

mod checkpoint;
mod policy;
mod replay;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION,
};
pub use policy::{epsilon_greedy_select, greedy_seed_set, run_episode, StateContext};
pub use replay::{ReplayBuffer, Transition};

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diffusion::SeedSet;
use crate::embedding::{
    compute_embeddings, init_embedding_params, EmbeddingParams, NodeEmbeddings,
};
use crate::graph::{Instance, InstancePool};
use crate::metrics::{evaluate_seed_set, McSummary};
use crate::par::{self, Exec};
use crate::qnet::{encode_state, QNetwork, StateVector, HIDDEN_DIM, STATE_TAIL};
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub budget: f64,
    pub episodes: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_min: f64,
    pub epsilon_decay: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub update_period: usize,
    pub phi: f64,
    pub seed: u64,
    pub embedding_dim: usize,
    pub embedding_iters: usize,
    pub hidden_dim: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            budget: 3000.0,
            episodes: 720,
            learning_rate: 0.001,
            gamma: 0.95,
            epsilon_start: 1.0,
            epsilon_min: 0.05,
            epsilon_decay: 0.995,
            replay_capacity: 10_000,
            batch_size: 32,
            update_period: 2,
            phi: 1.0,
            seed: 0,
            embedding_dim: 64,
            embedding_iters: 3,
            hidden_dim: HIDDEN_DIM,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return bad("budget must be positive");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if !(self.epsilon_min > 0.0
            && self.epsilon_min <= self.epsilon_start
            && self.epsilon_start <= 1.0)
        {
            return bad("need 0 < epsilon_min <= epsilon_start <= 1");
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return bad("epsilon_decay must lie in (0, 1]");
        }
        if self.batch_size == 0 || self.batch_size > self.replay_capacity {
            return bad("need 1 <= batch_size <= replay_capacity");
        }
        if self.update_period == 0 {
            return bad("update_period must be >= 1");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be >= 0");
        }
        if !(self.phi >= 0.0 && self.phi.is_finite()) {
            return bad("phi must be >= 0");
        }
        if self.embedding_dim == 0 || self.embedding_iters == 0 || self.hidden_dim == 0 {
            return bad("embedding_dim, embedding_iters and hidden_dim must be >= 1");
        }
        Ok(())
    }

    /// ε after `episode` annealing steps: `max(ε₀·ρ^e, ε_min)`.
    pub fn epsilon_after(&self, episode: usize) -> f64 {
        let e = i32::try_from(episode).unwrap_or(i32::MAX);
        (self.epsilon_start * self.epsilon_decay.powi(e)).max(self.epsilon_min)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// A trained policy: Q-network plus the fixed embedding parameters it was
/// trained against.
#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub net: QNetwork,
    pub embedding: EmbeddingParams,
    pub embedding_iters: usize,
}

impl Agent {
    /// Fresh, untrained agent for `cfg`.
    pub fn new(cfg: &TrainConfig) -> Result<Agent> {
        let embedding = init_embedding_params(cfg.embedding_dim, derive_seed(cfg.seed, 1))?;
        let net = QNetwork::new(
            cfg.embedding_dim + STATE_TAIL,
            cfg.hidden_dim,
            derive_seed(cfg.seed, 2),
        );
        Ok(Agent {
            net,
            embedding,
            embedding_iters: cfg.embedding_iters,
        })
    }

    pub fn embed(&self, instance: &Instance) -> Result<NodeEmbeddings> {
        compute_embeddings(
            &instance.graph,
            &instance.attrs,
            &self.embedding,
            self.embedding_iters,
        )
    }

    /// Greedy seed set for `instance` under `budget`.
    pub fn infer_seed_set(&self, instance: &Instance, budget: f64) -> Result<SeedSet> {
        let emb = self.embed(instance)?;
        Ok(greedy_seed_set(&self.net, instance, &emb, budget))
    }

    /// Greedy seed set plus its Monte Carlo evaluation.
    pub fn infer_and_evaluate(
        &self,
        instance: &Instance,
        budget: f64,
        m: usize,
        seed: u64,
        tau: f64,
    ) -> Result<(SeedSet, McSummary)> {
        let seeds = self.infer_seed_set(instance, budget)?;
        let summary = evaluate_seed_set(
            Exec::default(),
            &instance.graph,
            &instance.attrs,
            &instance.parts,
            &seeds,
            m,
            seed,
            tau,
        )?;
        Ok((seeds, summary))
    }
}

/// Per-episode progress record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub episode: usize,
    /// ε used during the episode.
    pub epsilon: f64,
    pub instance: usize,
    pub transitions: usize,
    pub buffer_size: usize,
    /// Minibatch loss, when a gradient step was taken after the episode.
    pub loss: Option<f64>,
    /// Sum of marginal rewards, i.e. the final single-rollout shaped return.
    pub episode_return: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub agent: Agent,
    pub log: Vec<EpisodeLog>,
    pub gradient_steps: usize,
    pub min_remaining_budget: f64,
}

/// Bellman target for one stored transition. The bootstrap maximum ranges
/// over candidates feasible under the transition's own remaining budget; if
/// there are none the transition counts as terminal.
pub fn bellman_target(
    net: &QNetwork,
    t: &Transition,
    instance: &Instance,
    cfg: &TrainConfig,
) -> f64 {
    if t.terminal {
        return t.reward;
    }
    let ctx = StateContext::new(instance, &t.embeddings, cfg.budget);
    let candidates = ctx.candidates(&t.after, &Default::default(), t.budget_after);
    match ctx.best(net, &candidates, t.after.len(), t.budget_after) {
        Some((_, q)) => t.reward + cfg.gamma * q,
        None => t.reward,
    }
}

/// Encoded `(s, a)` of a stored transition, as seen when the action was
/// chosen.
pub fn transition_state(t: &Transition, instance: &Instance, cfg: &TrainConfig) -> StateVector {
    let ctx = StateContext::new(instance, &t.embeddings, cfg.budget);
    encode_state(
        t.action,
        &t.embeddings,
        t.before.len(),
        t.budget_before,
        &instance.attrs,
        cfg.budget,
        ctx.k_max,
    )
}

/// Train on the pool's training instances.
pub fn train(cfg: &TrainConfig, pool: &InstancePool) -> Result<TrainOutcome> {
    train_with_observer(cfg, pool, |_, _| {})
}

/// [`train`], calling `observe` with each episode's log entry and
/// transitions.
pub fn train_with_observer<F>(
    cfg: &TrainConfig,
    pool: &InstancePool,
    mut observe: F,
) -> Result<TrainOutcome>
where
    F: FnMut(&EpisodeLog, &[Transition]),
{
    cfg.validate()?;
    if pool.train.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut agent = Agent::new(cfg)?;
    let mut pick_rng = rng::stream(derive_seed(cfg.seed, 3), 0);
    let mut episode_rng = rng::stream(derive_seed(cfg.seed, 3), 1);
    let mut batch_rng = rng::stream(derive_seed(cfg.seed, 3), 2);

    let mut cache: Vec<Option<Arc<NodeEmbeddings>>> = vec![None; pool.train.len()];
    let mut buffer = ReplayBuffer::new(cfg.replay_capacity);
    let mut log = Vec::with_capacity(cfg.episodes);
    let mut gradient_steps = 0;
    let mut min_remaining = cfg.budget;

    for episode in 1..=cfg.episodes {
        let epsilon = cfg.epsilon_after(episode - 1);
        let idx = pick_rng.random_range(0..pool.train.len());
        let instance = &pool.train[idx];
        let emb = match &cache[idx] {
            Some(e) => Arc::clone(e),
            None => {
                let e = Arc::new(agent.embed(instance)?);
                cache[idx] = Some(Arc::clone(&e));
                e
            }
        };
        let transitions = run_episode(
            &agent.net,
            idx,
            instance,
            &emb,
            cfg,
            epsilon,
            &mut episode_rng,
        );
        let episode_return: f64 = transitions.iter().map(|t| t.reward).sum();
        for t in &transitions {
            min_remaining = min_remaining.min(t.budget_after);
        }
        let n_transitions = transitions.len();
        let observed = transitions.clone();
        buffer.extend(transitions);

        let mut loss = None;
        if episode % cfg.update_period == 0 && buffer.len() >= cfg.batch_size {
            let batch = buffer.sample(&mut batch_rng, cfg.batch_size);
            let net = &agent.net;
            let items: Vec<(StateVector, f64)> = par::map_slice(Exec::default(), &batch, |t| {
                let inst = &pool.train[t.instance];
                (
                    transition_state(t, inst, cfg),
                    bellman_target(net, t, inst, cfg),
                )
            });
            let (l, grad) = agent.net.loss_and_grad(&items)?;
            agent.net.adam_step(&grad, cfg.learning_rate)?;
            gradient_steps += 1;
            loss = Some(l);
        }

        let entry = EpisodeLog {
            episode,
            epsilon,
            instance: instance.id,
            transitions: n_transitions,
            buffer_size: buffer.len(),
            loss,
            episode_return,
        };
        observe(&entry, &observed);
        log.push(entry);
    }
    Ok(TrainOutcome {
        agent,
        log,
        gradient_steps,
        min_remaining_budget: min_remaining,
    })
}

/// Write the training log as CSV.
pub fn write_training_log(log: &[EpisodeLog], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "episode",
        "epsilon",
        "instance",
        "transitions",
        "buffer_size",
        "loss",
        "episode_return",
    ])?;
    for e in log {
        w.write_record([
            e.episode.to_string(),
            e.epsilon.to_string(),
            e.instance.to_string(),
            e.transitions.to_string(),
            e.buffer_size.to_string(),
            e.loss.map(|l| l.to_string()).unwrap_or_default(),
            e.episode_return.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
