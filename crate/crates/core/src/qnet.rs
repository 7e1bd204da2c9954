//! Two-layer Q-network `Q(s) = w₂·relu(W₁s + b₁) + b₂` with analytic
//! gradients and Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::NodeEmbeddings;
use crate::graph::NodeAttrs;
use crate::rng;
use crate::{Error, Result};

pub const HIDDEN_DIM: usize = 128;
/// Scalar features appended to the candidate embedding.
pub const STATE_TAIL: usize = 3;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Candidate embedding followed by `[cost/B, remaining/B, |X|/k_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tail(&self) -> &[f64] {
        &self.0[self.0.len() - STATE_TAIL..]
    }
}

/// Largest possible seed-set size, `⌊B / 𝒞_min⌋`, at least 1.
pub fn max_seeds(budget: f64, min_cost: f64) -> usize {
    ((budget / min_cost).floor() as usize).max(1)
}

pub fn encode_state(
    candidate: usize,
    embeddings: &NodeEmbeddings,
    seed_count: usize,
    remaining_budget: f64,
    attrs: &NodeAttrs,
    budget: f64,
    k_max: usize,
) -> StateVector {
    let mut s = Vec::with_capacity(embeddings.dim() + STATE_TAIL);
    s.extend_from_slice(embeddings.get(candidate));
    s.push(attrs.cost(candidate) / budget);
    s.push(remaining_budget / budget);
    s.push(seed_count as f64 / k_max as f64);
    StateVector(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

/// Parameters live in one flat vector laid out as `[W₁ | b₁ | w₂ | b₂]`,
/// `W₁` row-major `hidden × input`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QNetwork {
    input: usize,
    hidden: usize,
    params: Vec<f64>,
    adam: AdamState,
}

fn param_count(input: usize, hidden: usize) -> usize {
    hidden * input + hidden + hidden + 1
}

impl QNetwork {
    /// Uniform `±1/√fan_in` initialisation.
    pub fn new(input: usize, hidden: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        let b_in = 1.0 / (input as f64).sqrt();
        let b_hid = 1.0 / (hidden as f64).sqrt();
        let mut params = Vec::with_capacity(param_count(input, hidden));
        params.extend((0..hidden * input + hidden).map(|_| r.random_range(-b_in..=b_in)));
        params.extend((0..hidden + 1).map(|_| r.random_range(-b_hid..=b_hid)));
        QNetwork::from_params(input, hidden, params).expect("shape is consistent")
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        QNetwork::from_params(input, hidden, vec![0.0; param_count(input, hidden)])
            .expect("shape is consistent")
    }

    pub fn from_params(input: usize, hidden: usize, params: Vec<f64>) -> Result<Self> {
        if input == 0 || hidden == 0 || params.len() != param_count(input, hidden) {
            return Err(Error::InvalidParameter(format!(
                "{} parameters do not fit a {input}x{hidden} network",
                params.len()
            )));
        }
        let n = params.len();
        Ok(QNetwork {
            input,
            hidden,
            params,
            adam: AdamState {
                step: 0,
                m: vec![0.0; n],
                v: vec![0.0; n],
            },
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    /// Check shapes and finiteness, e.g. after deserialising.
    pub fn validate(&self) -> Result<()> {
        let n = param_count(self.input, self.hidden);
        if self.params.len() != n || self.adam.m.len() != n || self.adam.v.len() != n {
            return Err(Error::CheckpointMismatch(format!(
                "parameter buffers do not match a {}x{} network",
                self.input, self.hidden
            )));
        }
        if self.params.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite network parameter".into(),
            ));
        }
        Ok(())
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], f64) {
        let (w1, rest) = self.params.split_at(self.hidden * self.input);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        (w1, b1, w2, b2[0])
    }

    fn pre_activations(&self, s: &[f64]) -> Vec<f64> {
        let (w1, b1, _, _) = self.split();
        w1.chunks_exact(self.input)
            .zip(b1)
            .map(|(row, b)| row.iter().zip(s).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }

    pub fn forward(&self, s: &[f64]) -> f64 {
        assert_eq!(s.len(), self.input, "state has wrong dimension");
        let (_, _, w2, b2) = self.split();
        let z = self.pre_activations(s);
        z.iter().zip(w2).map(|(z, w)| z.max(0.0) * w).sum::<f64>() + b2
    }

    /// Mean squared error `(1/K)·Σ (y − Q(s))²` and its gradient with respect
    /// to the flat parameter vector. The relu subgradient at 0 is 0.
    pub fn loss_and_grad(&self, batch: &[(StateVector, f64)]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let (input, hidden) = (self.input, self.hidden);
        let (_, _, w2, b2) = self.split();
        let k = batch.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        let (g_w1, rest) = grad.split_at_mut(hidden * input);
        let (g_b1, rest) = rest.split_at_mut(hidden);
        let (g_w2, g_b2) = rest.split_at_mut(hidden);
        for (state, y) in batch {
            let s = state.as_slice();
            assert_eq!(s.len(), input, "state has wrong dimension");
            let z = self.pre_activations(s);
            let q = z.iter().zip(w2).map(|(z, w)| z.max(0.0) * w).sum::<f64>() + b2;
            let diff = q - y;
            loss += diff * diff;
            let dq = 2.0 * diff / k;
            g_b2[0] += dq;
            for j in 0..hidden {
                g_w2[j] += dq * z[j].max(0.0);
                if z[j] > 0.0 {
                    let dz = dq * w2[j];
                    g_b1[j] += dz;
                    for (g, x) in g_w1[j * input..(j + 1) * input].iter_mut().zip(s) {
                        *g += dz * x;
                    }
                }
            }
        }
        Ok((loss / k, grad))
    }

    /// One Adam update with bias correction.
    pub fn adam_step(&mut self, grad: &[f64], lr: f64) -> Result<()> {
        if grad.len() != self.params.len() {
            return Err(Error::InvalidParameter(format!(
                "gradient has {} entries, network has {}",
                grad.len(),
                self.params.len()
            )));
        }
        let a = &mut self.adam;
        a.step += 1;
        let t = a.step as i32;
        let c1 = 1.0 - ADAM_BETA1.powi(t);
        let c2 = 1.0 - ADAM_BETA2.powi(t);
        for (((p, g), m), v) in self.params.iter_mut().zip(grad).zip(&mut a.m).zip(&mut a.v) {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
        Ok(())
    }
}
