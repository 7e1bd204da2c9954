//! JSON checkpoints holding the Q-network (with Adam state), the fixed
//! embedding parameters and the training configuration.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Agent, TrainConfig};
use crate::embedding::EmbeddingParams;
use crate::qnet::{QNetwork, STATE_TAIL};
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "fairpm-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub config: TrainConfig,
    pub embedding_iters: usize,
    pub embedding: EmbeddingParams,
    pub network: QNetwork,
}

impl Checkpoint {
    pub fn new(agent: &Agent, config: &TrainConfig) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            config_hash: config.hash(),
            config: config.clone(),
            embedding_iters: agent.embedding_iters,
            embedding: agent.embedding.clone(),
            network: agent.net.clone(),
        }
    }

    /// Reject anything that does not describe a usable agent, and, when
    /// given, anything whose architecture differs from `expected`.
    pub fn validate(&self, expected: Option<&TrainConfig>) -> Result<()> {
        let mismatch = |m: String| Err(Error::CheckpointMismatch(m));
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return mismatch(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            ));
        }
        if self.config_hash != self.config.hash() {
            return mismatch("config hash does not match stored config".into());
        }
        self.network.validate()?;
        let d = self.embedding.dim();
        if self.network.input_dim() != d + STATE_TAIL {
            return mismatch(format!(
                "network input {} does not fit embedding dimension {d}",
                self.network.input_dim()
            ));
        }
        if let Some(cfg) = expected {
            if cfg.embedding_dim != d
                || cfg.hidden_dim != self.network.hidden_dim()
                || cfg.embedding_iters != self.embedding_iters
            {
                return mismatch(format!(
                    "checkpoint is d_emb={d}, hidden={}, T_emb={}; expected d_emb={}, hidden={}, T_emb={}",
                    self.network.hidden_dim(),
                    self.embedding_iters,
                    cfg.embedding_dim,
                    cfg.hidden_dim,
                    cfg.embedding_iters
                ));
            }
        }
        Ok(())
    }

    pub fn into_agent(self) -> Agent {
        Agent {
            net: self.network,
            embedding: self.embedding,
            embedding_iters: self.embedding_iters,
        }
    }
}

pub fn save_checkpoint(agent: &Agent, config: &TrainConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &Checkpoint::new(agent, config))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(
    path: impl AsRef<Path>,
    expected: Option<&TrainConfig>,
) -> Result<(Agent, TrainConfig)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let ckpt: Checkpoint = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::CheckpointMismatch(format!("{}: {e}", path.display())))?;
    ckpt.validate(expected)?;
    let cfg = ckpt.config.clone();
    Ok((ckpt.into_agent(), cfg))
}
