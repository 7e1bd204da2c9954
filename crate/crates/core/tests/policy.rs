//! Statistical checks of the ε-greedy selector.

use std::collections::BTreeSet;

use fairpm::diffusion::SeedSet;
use fairpm::embedding::{compute_embeddings, init_embedding_params};
use fairpm::graph::{CommunityPartition, Graph, Instance, NodeAttrs};
use fairpm::qnet::QNetwork;
use fairpm::rng;
use fairpm::trainer::{epsilon_greedy_select, StateContext};

fn instance() -> Instance {
    let g = Graph::from_edges(10, false, (0..9).map(|v| (v, v + 1, 0.3))).unwrap();
    // nodes 3 and 7 cost more than the remaining budget used below
    let mut cost = vec![2.0; 10];
    cost[3] = 9.0;
    cost[7] = 9.0;
    let attrs = NodeAttrs::new(cost, vec![1.0; 10]).unwrap();
    let parts = CommunityPartition::single(&attrs).unwrap();
    Instance::new(0, g, attrs, parts).unwrap()
}

#[test]
fn epsilon_one_is_uniform_over_feasible_candidates() {
    // χ²(0.999) for 6 degrees of freedom
    const CRITICAL: f64 = 22.458;
    const DRAWS: usize = 10_000;
    let inst = instance();
    let emb = compute_embeddings(
        &inst.graph,
        &inst.attrs,
        &init_embedding_params(4, 1).unwrap(),
        2,
    )
    .unwrap();
    let ctx = StateContext::new(&inst, &emb, 20.0);
    let net = QNetwork::new(7, 8, 5);
    // node 0 already chosen, node 5 excluded; remaining budget 8
    let chosen = SeedSet::new([0], &inst.attrs).unwrap();
    let excluded = BTreeSet::from([5]);
    let feasible = [1, 2, 4, 6, 8, 9];
    let mut counts = [0usize; 10];
    let mut r = rng::seeded(77);
    for _ in 0..DRAWS {
        let v = epsilon_greedy_select(&net, &ctx, &chosen, &excluded, 1.0, 8.0, &mut r).unwrap();
        counts[v] += 1;
    }
    for v in [0, 3, 5, 7] {
        assert_eq!(counts[v], 0, "node {v} must never be drawn");
    }
    let expected = DRAWS as f64 / feasible.len() as f64;
    let chi2: f64 = feasible
        .iter()
        .map(|&v| (counts[v] as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < CRITICAL, "chi-square {chi2} with counts {counts:?}");
}

#[test]
fn epsilon_zero_is_the_argmax() {
    let inst = instance();
    let emb = compute_embeddings(
        &inst.graph,
        &inst.attrs,
        &init_embedding_params(4, 1).unwrap(),
        2,
    )
    .unwrap();
    let ctx = StateContext::new(&inst, &emb, 20.0);
    let net = QNetwork::new(7, 8, 9);
    let chosen = SeedSet::empty();
    let none = BTreeSet::new();
    let pick =
        epsilon_greedy_select(&net, &ctx, &chosen, &none, 0.0, 20.0, &mut rng::seeded(1)).unwrap();
    let best = (0..10).map(|v| (v, ctx.q_value(&net, v, 0, 20.0))).fold(
        (usize::MAX, f64::NEG_INFINITY),
        |acc, (v, q)| if q > acc.1 { (v, q) } else { acc },
    );
    assert_eq!(pick, best.0);
    assert_eq!(
        epsilon_greedy_select(&net, &ctx, &chosen, &none, 0.0, 1.0, &mut rng::seeded(1)),
        None
    );
}
