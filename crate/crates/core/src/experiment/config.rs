//! Flat `key = value` experiment configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{PoolConfig, ProbabilityModel};
use crate::rng::derive_seed;
use crate::trainer::TrainConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rl4fpm,
    Random,
    HighDegree,
    Pagerank,
    Parity,
    FairPagerank,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Rl4fpm,
        Algorithm::Random,
        Algorithm::HighDegree,
        Algorithm::Pagerank,
        Algorithm::Parity,
        Algorithm::FairPagerank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rl4fpm => "rl4fpm",
            Algorithm::Random => "random",
            Algorithm::HighDegree => "high_degree",
            Algorithm::Pagerank => "pagerank",
            Algorithm::Parity => "parity",
            Algorithm::FairPagerank => "fair_pagerank",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Where the source graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DatasetSpec {
    File(PathBuf),
    /// `ba:<n>:<m>` synthetic Barabási–Albert graph.
    BarabasiAlbert {
        n: usize,
        m: usize,
    },
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSpec::File(p) => write!(f, "{}", p.display()),
            DatasetSpec::BarabasiAlbert { n, m } => write!(f, "ba:{n}:{m}"),
        }
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Config("empty dataset".into()));
        }
        if let Some(rest) = s.strip_prefix("ba:") {
            let bad = || Error::Config(format!("dataset {s:?}: expected ba:<n>:<m>"));
            let (n, m) = rest.split_once(':').ok_or_else(bad)?;
            return Ok(DatasetSpec::BarabasiAlbert {
                n: n.parse().map_err(|_| bad())?,
                m: m.parse().map_err(|_| bad())?,
            });
        }
        Ok(DatasetSpec::File(PathBuf::from(s)))
    }
}

impl From<DatasetSpec> for String {
    fn from(d: DatasetSpec) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DatasetSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

pub const DEFAULT_BUDGETS: [f64; 6] = [500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub directed: bool,
    /// Optional `node_id,cost,benefit,community` file replacing the sampled
    /// attributes and communities.
    pub attributes: Option<PathBuf>,
    pub pool: PoolConfig,
    pub budgets: Vec<f64>,
    pub mc_rollouts: usize,
    pub algorithms: Vec<Algorithm>,
    pub train: TrainConfig,
    /// Training seed; derived from the master seed when unset.
    pub train_seed: Option<u64>,
    pub tau: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub checkpoint: Option<PathBuf>,
    /// Fill the `seconds` column of results.csv. Off by default so reruns are
    /// byte-identical; timing.csv is always written.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSpec::BarabasiAlbert { n: 2000, m: 4 },
            directed: false,
            attributes: None,
            pool: PoolConfig::default(),
            budgets: DEFAULT_BUDGETS.to_vec(),
            mc_rollouts: 1000,
            algorithms: Algorithm::ALL.to_vec(),
            train: TrainConfig::default(),
            train_seed: None,
            tau: 0.0,
            output_dir: PathBuf::from("out"),
            seed: 0,
            checkpoint: None,
            timing: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected a boolean, got {value:?}"
        ))),
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty() && value != "none").then(|| PathBuf::from(value))
}

impl ExperimentConfig {
    /// Names accepted by [`ExperimentConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "dataset",
        "directed",
        "attributes",
        "probability",
        "n_train",
        "n_test",
        "nodes_per_instance",
        "cost_min",
        "cost_max",
        "benefit_min",
        "benefit_max",
        "minority_fraction",
        "budgets",
        "mc_rollouts",
        "algorithms",
        "tau",
        "output_dir",
        "seed",
        "checkpoint",
        "timing",
        "train_budget",
        "episodes",
        "learning_rate",
        "gamma",
        "epsilon_start",
        "epsilon_min",
        "epsilon_decay",
        "replay_capacity",
        "batch_size",
        "update_period",
        "phi",
        "train_seed",
        "embedding_dim",
        "embedding_iters",
        "hidden_dim",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let k = key.trim();
        match k {
            "dataset" => self.dataset = value.parse()?,
            "directed" => self.directed = parse_bool(k, value)?,
            "attributes" => self.attributes = optional_path(value),
            "probability" => {
                self.pool.probability = value
                    .parse::<ProbabilityModel>()
                    .map_err(|e| Error::Config(e.to_string()))?
            }
            "n_train" => self.pool.n_train = parse_num(k, value)?,
            "n_test" => self.pool.n_test = parse_num(k, value)?,
            "nodes_per_instance" => self.pool.nodes_per_instance = parse_num(k, value)?,
            "cost_min" => self.pool.cost_range.0 = parse_num(k, value)?,
            "cost_max" => self.pool.cost_range.1 = parse_num(k, value)?,
            "benefit_min" => self.pool.benefit_range.0 = parse_num(k, value)?,
            "benefit_max" => self.pool.benefit_range.1 = parse_num(k, value)?,
            "minority_fraction" => self.pool.minority_fraction = parse_num(k, value)?,
            "budgets" => self.budgets = parse_list(k, value)?,
            "mc_rollouts" => self.mc_rollouts = parse_num(k, value)?,
            "algorithms" => {
                self.algorithms = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "tau" => self.tau = parse_num(k, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "seed" => self.seed = parse_num(k, value)?,
            "checkpoint" => self.checkpoint = optional_path(value),
            "timing" => self.timing = parse_bool(k, value)?,
            "train_budget" => self.train.budget = parse_num(k, value)?,
            "episodes" => self.train.episodes = parse_num(k, value)?,
            "learning_rate" => self.train.learning_rate = parse_num(k, value)?,
            "gamma" => self.train.gamma = parse_num(k, value)?,
            "epsilon_start" => self.train.epsilon_start = parse_num(k, value)?,
            "epsilon_min" => self.train.epsilon_min = parse_num(k, value)?,
            "epsilon_decay" => self.train.epsilon_decay = parse_num(k, value)?,
            "replay_capacity" => self.train.replay_capacity = parse_num(k, value)?,
            "batch_size" => self.train.batch_size = parse_num(k, value)?,
            "update_period" => self.train.update_period = parse_num(k, value)?,
            "phi" => self.train.phi = parse_num(k, value)?,
            "train_seed" => self.train_seed = Some(parse_num(k, value)?),
            "embedding_dim" => self.train.embedding_dim = parse_num(k, value)?,
            "embedding_iters" => self.train.embedding_iters = parse_num(k, value)?,
            "hidden_dim" => self.train.hidden_dim = parse_num(k, value)?,
            _ => return Err(Error::Config(format!("unknown key {k:?}"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines. `#` starts a comment; blank lines are
    /// ignored; later lines win.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Render as a config file that [`apply_text`](Self::apply_text) reads back.
    pub fn to_text(&self) -> String {
        let opt = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or("none".to_string(), |p| p.display().to_string())
        };
        let list = |xs: &[String]| xs.join(",");
        let t = &self.train;
        let mut lines = vec![
            format!("dataset = {}", self.dataset),
            format!("directed = {}", self.directed),
            format!("attributes = {}", opt(&self.attributes)),
            format!("probability = {}", self.pool.probability),
            format!("n_train = {}", self.pool.n_train),
            format!("n_test = {}", self.pool.n_test),
            format!("nodes_per_instance = {}", self.pool.nodes_per_instance),
            format!("cost_min = {}", self.pool.cost_range.0),
            format!("cost_max = {}", self.pool.cost_range.1),
            format!("benefit_min = {}", self.pool.benefit_range.0),
            format!("benefit_max = {}", self.pool.benefit_range.1),
            format!("minority_fraction = {}", self.pool.minority_fraction),
            format!(
                "budgets = {}",
                list(&self.budgets.iter().map(f64::to_string).collect::<Vec<_>>())
            ),
            format!("mc_rollouts = {}", self.mc_rollouts),
            format!(
                "algorithms = {}",
                list(
                    &self
                        .algorithms
                        .iter()
                        .map(Algorithm::to_string)
                        .collect::<Vec<_>>()
                )
            ),
            format!("tau = {}", self.tau),
            format!("output_dir = {}", self.output_dir.display()),
            format!("seed = {}", self.seed),
            format!("checkpoint = {}", opt(&self.checkpoint)),
            format!("timing = {}", self.timing),
            format!("train_budget = {}", t.budget),
            format!("episodes = {}", t.episodes),
            format!("learning_rate = {}", t.learning_rate),
            format!("gamma = {}", t.gamma),
            format!("epsilon_start = {}", t.epsilon_start),
            format!("epsilon_min = {}", t.epsilon_min),
            format!("epsilon_decay = {}", t.epsilon_decay),
            format!("replay_capacity = {}", t.replay_capacity),
            format!("batch_size = {}", t.batch_size),
            format!("update_period = {}", t.update_period),
            format!("phi = {}", t.phi),
            format!("embedding_dim = {}", t.embedding_dim),
            format!("embedding_iters = {}", t.embedding_iters),
            format!("hidden_dim = {}", t.hidden_dim),
        ];
        if let Some(s) = self.train_seed {
            lines.push(format!("train_seed = {s}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.budgets.is_empty() {
            return bad("budgets must not be empty".into());
        }
        if self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0))
            || self.budgets.windows(2).any(|w| w[0] >= w[1])
        {
            return bad(format!(
                "budgets must be positive and strictly ascending: {:?}",
                self.budgets
            ));
        }
        if self.mc_rollouts == 0 {
            return bad("mc_rollouts must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty".into());
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return bad("algorithms listed twice".into());
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau {} not in [0, 1]", self.tau));
        }
        let p = &self.pool;
        if p.n_train == 0 || p.n_test == 0 || p.nodes_per_instance < 2 {
            return bad("need n_train >= 1, n_test >= 1 and nodes_per_instance >= 2".into());
        }
        for (name, (lo, hi)) in [("cost", p.cost_range), ("benefit", p.benefit_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return bad(format!(
                    "{name} range [{lo}, {hi}] must satisfy 0 < min <= max"
                ));
            }
        }
        if !(p.minority_fraction > 0.0 && p.minority_fraction < 1.0) {
            return bad(format!(
                "minority_fraction {} not in (0, 1)",
                p.minority_fraction
            ));
        }
        if let DatasetSpec::BarabasiAlbert { n, m } = self.dataset {
            if m == 0 || n <= m {
                return bad(format!("ba:{n}:{m} needs 1 <= m < n"));
            }
        }
        self.train_config()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Training configuration with its seed resolved.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seeds().train,
            ..self.train.clone()
        }
    }

    pub fn seeds(&self) -> DerivedSeeds {
        DerivedSeeds::new(self.seed, self.train_seed)
    }
}

/// Every seed used by an experiment, derived from the master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedSeeds {
    pub master: u64,
    pub graph: u64,
    pub pool: u64,
    pub eval: u64,
    pub random_baseline: u64,
    pub train: u64,
}

impl DerivedSeeds {
    pub fn new(master: u64, train: Option<u64>) -> Self {
        DerivedSeeds {
            master,
            graph: derive_seed(master, 10),
            pool: derive_seed(master, 11),
            eval: derive_seed(master, 12),
            random_baseline: derive_seed(master, 13),
            train: train.unwrap_or_else(|| derive_seed(master, 14)),
        }
    }

    /// Rollout seed shared by every algorithm on one (instance, budget) cell.
    pub fn eval_cell(&self, instance: usize, budget_index: usize) -> u64 {
        derive_seed(derive_seed(self.eval, instance as u64), budget_index as u64)
    }

    pub fn random_cell(&self, instance: usize, budget_index: usize) -> u64 {
        derive_seed(
            derive_seed(self.random_baseline, instance as u64),
            budget_index as u64,
        )
    }
}
