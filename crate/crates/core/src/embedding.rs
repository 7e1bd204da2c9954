//! Structure2Vec style node embeddings with fixed random parameters.
//!
//! `h⁰ = 0`, then `T` rounds of
//! `h_v ← relu(W_feat·[ĉ_v, b̂_v] + W_agg·Σ_{u∈N(v)} h_u + w_edge·Σ_{u∈N(v)} p(u,v))`
//! where `ĉ`, `b̂` are min-max normalised cost and benefit and `N(v)` is the
//! in-neighbourhood (the full neighbourhood for undirected graphs).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeAttrs};
use crate::par::{self, Exec};
use crate::rng;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    dim: usize,
    /// `dim × 2`, row-major.
    w_feat: Vec<f64>,
    /// `dim × dim`, row-major.
    w_agg: Vec<f64>,
    w_edge: Vec<f64>,
}

impl EmbeddingParams {
    pub fn from_parts(
        dim: usize,
        w_feat: Vec<f64>,
        w_agg: Vec<f64>,
        w_edge: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 || w_feat.len() != 2 * dim || w_agg.len() != dim * dim || w_edge.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "embedding parameter shapes do not match dimension {dim}"
            )));
        }
        if w_feat
            .iter()
            .chain(&w_agg)
            .chain(&w_edge)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidParameter(
                "non-finite embedding parameter".into(),
            ));
        }
        Ok(EmbeddingParams {
            dim,
            w_feat,
            w_agg,
            w_edge,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn w_feat(&self) -> &[f64] {
        &self.w_feat
    }

    pub fn w_agg(&self) -> &[f64] {
        &self.w_agg
    }

    pub fn w_edge(&self) -> &[f64] {
        &self.w_edge
    }
}

/// Entries i.i.d. uniform in `[−1/√d, 1/√d]`.
pub fn init_embedding_params(dim: usize, seed: u64) -> Result<EmbeddingParams> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be >= 1".into(),
        ));
    }
    let bound = 1.0 / (dim as f64).sqrt();
    let mut r = rng::seeded(seed);
    let mut draw =
        |len: usize| -> Vec<f64> { (0..len).map(|_| r.random_range(-bound..=bound)).collect() };
    let w_feat = draw(2 * dim);
    let w_agg = draw(dim * dim);
    let w_edge = draw(dim);
    EmbeddingParams::from_parts(dim, w_feat, w_agg, w_edge)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeEmbeddings {
    dim: usize,
    iterations: usize,
    data: Vec<f64>,
}

impl NodeEmbeddings {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn get(&self, v: usize) -> &[f64] {
        &self.data[v * self.dim..(v + 1) * self.dim]
    }
}

fn min_max(xs: &[f64]) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    xs.iter()
        .map(|&x| if span > 0.0 { (x - lo) / span } else { 0.0 })
        .collect()
}

pub fn compute_embeddings(
    g: &Graph,
    attrs: &NodeAttrs,
    params: &EmbeddingParams,
    iterations: usize,
) -> Result<NodeEmbeddings> {
    compute_embeddings_with(Exec::default(), g, attrs, params, iterations)
}

pub fn compute_embeddings_with(
    exec: Exec,
    g: &Graph,
    attrs: &NodeAttrs,
    params: &EmbeddingParams,
    iterations: usize,
) -> Result<NodeEmbeddings> {
    if iterations == 0 {
        return Err(Error::InvalidParameter(
            "need at least one embedding iteration".into(),
        ));
    }
    if attrs.len() != g.node_count() {
        return Err(Error::InvalidParameter(
            "attribute count does not match graph".into(),
        ));
    }
    let d = params.dim;
    let cost = min_max(attrs.costs());
    let benefit = min_max(attrs.benefits());
    let n = g.node_count();
    let mut h = vec![0.0; n * d];
    for _ in 0..iterations {
        let rows = par::map_range(exec, n, |v| {
            let mut agg = vec![0.0; d];
            for &u in g.in_neighbors(v) {
                for (a, x) in agg.iter_mut().zip(&h[u * d..(u + 1) * d]) {
                    *a += x;
                }
            }
            let psum: f64 = g.in_probs(v).iter().sum();
            (0..d)
                .map(|i| {
                    let feat =
                        params.w_feat[2 * i] * cost[v] + params.w_feat[2 * i + 1] * benefit[v];
                    let row = &params.w_agg[i * d..(i + 1) * d];
                    let mix: f64 = row.iter().zip(&agg).map(|(w, a)| w * a).sum();
                    (feat + mix + params.w_edge[i] * psum).max(0.0)
                })
                .collect::<Vec<f64>>()
        });
        h = rows.concat();
    }
    Ok(NodeEmbeddings {
        dim: d,
        iterations,
        data: h,
    })
}
