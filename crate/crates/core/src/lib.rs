//! Budget-constrained, fairness-aware profit maximization on social graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: graph storage, SNAP edge-list ingestion, attribute and
//!   community assignment, subgraph instance sampling.
//! - [`diffusion`]: Independent Cascade rollouts, Monte Carlo estimation and an
//!   exact live-edge enumeration oracle for tiny graphs.
//! - [`metrics`]: cost, benefit, profit, community benefit ratios, maximin
//!   fairness and the shaped reward used during training.
//! - [`embedding`]: fixed-parameter Structure2Vec style node embeddings.
//! - [`qnet`]: the two-layer Q-network with hand-written backprop and Adam.
//! - [`trainer`]: the deep Q-learning loop (RL4FPM), replay buffer and greedy
//!   inference.
//! - [`baselines`]: Random, High Degree, PageRank, Parity and Fair-PageRank
//!   seed selectors.
//! - [`experiment`]: experiment orchestration and CSV reporting.
//!
//! Data-parallel inner loops (Monte Carlo rollouts, candidate scoring,
//! embedding sweeps) go through [`par`], which uses rayon when the `parallel`
//! feature is enabled and a plain sequential loop otherwise. Results are
//! identical either way.

pub mod baselines;
pub mod diffusion;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod par;
pub mod qnet;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
