//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. `ACCEPTANCE_ONLY=3,7` restricts the run.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fairpm::baselines;
use fairpm::diffusion::{
    estimate_spread_and_benefit, exact_expected_profit, exact_shaped_objective, InfluencedSet,
    SeedSet,
};
use fairpm::experiment::{
    build_pool, evaluate_pool, prepare_agent, select_seeds, Algorithm, ExperimentConfig,
};
use fairpm::graph::{CommunityPartition, Graph, Instance, InstancePool, NodeAttrs};
use fairpm::metrics::{community_benefit_ratio, maximin_fairness};
use fairpm::qnet::{QNetwork, StateVector};
use fairpm::rng;
use fairpm::trainer::{train, train_with_observer, ReplayBuffer, TrainConfig};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

/// (labels, benefits, influenced mask, hand-computed f if any)
type FairnessCase = (Vec<usize>, Vec<f64>, Vec<bool>, Option<f64>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String, ok: bool) -> Outcome {
    let took = start.elapsed();
    let detail = format!(
        "{detail}; {:.1}s (limit {}s)",
        took.as_secs_f64(),
        limit.as_secs()
    );
    check(ok && took < limit, detail)
}

// ---------------------------------------------------------------- 1

fn random_small_graph<R: Rng>(r: &mut R) -> (Graph, NodeAttrs) {
    let n = r.random_range(2..=6);
    let directed = r.random_bool(0.5);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && (directed || u < v) {
                pairs.push((u, v));
            }
        }
    }
    pairs.shuffle(r);
    let m = r.random_range(1..=pairs.len().min(10));
    let edges: Vec<_> = pairs[..m]
        .iter()
        .map(|&(u, v)| (u, v, r.random_range(0.05..0.95)))
        .collect();
    let g = Graph::from_edges(n, directed, edges).unwrap();
    let attrs = NodeAttrs::new(
        (0..n).map(|_| r.random_range(1.0..20.0)).collect(),
        (0..n).map(|_| r.random_range(1.0..30.0)).collect(),
    )
    .unwrap();
    (g, attrs)
}

fn criterion_1() -> Outcome {
    const GRAPHS: usize = 50;
    const M: usize = 50_000;
    const SE_MULTIPLE: f64 = 4.0;
    // floating-point slack for cases whose benefit is (numerically) constant
    const ABS_SLACK: f64 = 1e-9;
    let start = Instant::now();
    let mut r = rng::seeded(0xA11CE);
    let mut hits = 0;
    let mut worst: f64 = 0.0;
    let mut constant = 0;
    for i in 0..GRAPHS {
        let (g, attrs) = random_small_graph(&mut r);
        assert!(g.node_count() <= 6 && g.edge_count() <= 10);
        let n = g.node_count();
        // at most half the nodes, so most cases leave room for a cascade
        let k = r.random_range(1..=(n / 2).max(1));
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(&mut r);
        let seeds = SeedSet::new(nodes[..k].iter().copied(), &attrs).unwrap();
        let exact = exact_expected_profit(&g, &attrs, &seeds).unwrap();
        let est = estimate_spread_and_benefit(&g, &attrs, &seeds, M, i as u64).unwrap();
        let mc = est.mean_benefit - seeds.cost();
        let se = est.benefit_std() / (M as f64).sqrt();
        let dev = (mc - exact).abs();
        if dev <= SE_MULTIPLE * se + ABS_SLACK {
            hits += 1;
        }
        if se > ABS_SLACK {
            worst = worst.max(dev / se);
        } else {
            constant += 1;
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!(
            "{hits}/{GRAPHS} within {SE_MULTIPLE} SE at m={M} (need >= 48); largest deviation {worst:.2} SE; \
             {constant} cases with constant benefit"
        ),
        hits >= 48,
    )
}

// ---------------------------------------------------------------- 2

fn random_batch<R: Rng>(r: &mut R, input: usize, size: usize) -> Vec<(StateVector, f64)> {
    (0..size)
        .map(|_| {
            let s = (0..input).map(|_| r.random_range(-1.0..1.0)).collect();
            (StateVector(s), r.random_range(-2.0..2.0))
        })
        .collect()
}

/// Returns (coordinates checked, worst relative error).
fn finite_difference_check(net: &mut QNetwork, batch: &[(StateVector, f64)]) -> (usize, f64) {
    const H: f64 = 1e-5;
    let (_, grad) = net.loss_and_grad(batch).unwrap();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (i, &analytic) in grad.iter().enumerate() {
        if analytic.abs() <= 1e-8 {
            continue;
        }
        let orig = net.params()[i];
        net.params_mut()[i] = orig + H;
        let up = net.loss_and_grad(batch).unwrap().0;
        net.params_mut()[i] = orig - H;
        let down = net.loss_and_grad(batch).unwrap().0;
        net.params_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * H);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs());
        worst = worst.max(rel);
        checked += 1;
    }
    (checked, worst)
}

fn criterion_2() -> Outcome {
    const PAIRS: usize = 100;
    const REL_TOL: f64 = 1e-4;
    let start = Instant::now();
    let mut r = rng::seeded(0x6AD);
    let mut worst: f64 = 0.0;
    let mut coords = 0;
    for pair in 0..PAIRS {
        // the first two pairs use the production shape (64-dim embedding + 3)
        let (input, hidden, batch) = if pair < 2 {
            (67, 128, 4)
        } else {
            (
                r.random_range(1..=12),
                r.random_range(1..=24),
                r.random_range(1..=8),
            )
        };
        let mut net = QNetwork::new(input, hidden, r.random());
        for p in net.params_mut() {
            *p += r.random_range(-0.1..0.1);
        }
        let batch = random_batch(&mut r, input, batch);
        let (n, w) = finite_difference_check(&mut net, &batch);
        coords += n;
        worst = worst.max(w);
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{PAIRS} nets, {coords} coordinates, worst relative error {worst:.2e} (tol {REL_TOL:e})"),
        worst <= REL_TOL,
    )
}

// ---------------------------------------------------------------- 3

const TOY_BUDGET: f64 = 11.0;

/// Ten nodes: a majority community {0..6} around hub 0 and a minority
/// {7, 8, 9} attached through a weak bridge. Every cost is at least 4, so a
/// budget of 11 admits at most two seeds.
fn toy_instance() -> Instance {
    let edges = vec![
        (0, 1, 0.6),
        (0, 2, 0.6),
        (0, 3, 0.6),
        (0, 4, 0.5),
        (1, 2, 0.3),
        (3, 4, 0.3),
        (4, 5, 0.4),
        (5, 6, 0.5),
        (6, 7, 0.2),
        (7, 8, 0.6),
        (7, 9, 0.6),
        (8, 9, 0.3),
    ];
    let g = Graph::from_edges(10, false, edges).unwrap();
    let attrs = NodeAttrs::new(
        vec![6.0, 4.0, 4.0, 4.0, 5.0, 4.0, 4.0, 5.0, 4.0, 4.0],
        vec![20.0, 5.0, 5.0, 5.0, 8.0, 5.0, 5.0, 15.0, 6.0, 6.0],
    )
    .unwrap();
    let parts =
        CommunityPartition::from_labels(vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 1], &attrs).unwrap();
    Instance::new(0, g, attrs, parts).unwrap()
}

fn feasible_sets(attrs: &NodeAttrs, budget: f64) -> Vec<SeedSet> {
    let n = attrs.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let s = SeedSet::new((0..n).filter(|v| mask >> v & 1 == 1), attrs).unwrap();
        if s.cost() <= budget {
            out.push(s);
        }
    }
    out
}

fn criterion_3() -> Outcome {
    const EPISODES: usize = 500;
    const REL_GAP: f64 = 0.05;
    const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
    let start = Instant::now();
    let toy = toy_instance();
    let phi = TrainConfig::default().phi;
    let value =
        |s: &SeedSet| exact_shaped_objective(&toy.graph, &toy.attrs, &toy.parts, s, phi).unwrap();
    let sets = feasible_sets(&toy.attrs, TOY_BUDGET);
    assert!(sets.iter().all(|s| s.len() <= 2));
    let mut values: Vec<f64> = sets.iter().map(value).collect();
    values.sort_by(f64::total_cmp);
    let optimum = *values.last().unwrap();
    let near_optimal = values
        .iter()
        .filter(|&&v| optimum - v <= REL_GAP * optimum.abs())
        .count();

    let pool = InstancePool {
        train: vec![toy.clone()],
        test: vec![toy.clone()],
        seed: 0,
    };
    let run = |episodes: usize| {
        let mut good = 0;
        let mut report = Vec::new();
        for seed in SEEDS {
            let cfg = TrainConfig {
                budget: TOY_BUDGET,
                episodes,
                seed,
                ..TrainConfig::default()
            };
            let outcome = train(&cfg, &pool).unwrap();
            let chosen = outcome.agent.infer_seed_set(&toy, TOY_BUDGET).unwrap();
            let v = value(&chosen);
            if optimum - v <= REL_GAP * optimum.abs() {
                good += 1;
            }
            report.push(format!("{:?}={:.3}", chosen.nodes(), v));
        }
        (good, report.join(" "))
    };
    let (good, report) = run(EPISODES);
    let verdict = good >= 4;
    let timed = within(
        Duration::from_secs(300),
        start,
        format!(
            "{good}/5 seeds within {:.0}% of optimum {optimum:.3} (need >= 4); {near_optimal}/{} feasible sets are; policies {report}",
            REL_GAP * 100.0,
            sets.len(),
        ),
        verdict,
    );
    // Control run, not part of the verdict: the same setup with a longer
    // training horizon.
    let (control, _) = run(6 * EPISODES);
    let note = format!("; control at {} episodes: {control}/5", 6 * EPISODES);
    timed.map(|d| d + &note).map_err(|d| d + &note)
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    const TRIPLES: usize = 1000;
    let start = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.apply_text(
        "dataset = ba:400:3\nnodes_per_instance = 60\nn_train = 4\nn_test = 4\n\
         cost_min = 1\ncost_max = 40\nepisodes = 40\ntrain_budget = 150\nembedding_dim = 16\nhidden_dim = 32\n",
    )
    .unwrap();
    let pool = build_pool(&cfg).unwrap();
    let agent = prepare_agent(&cfg, &pool).unwrap().agent;
    let instances: Vec<&Instance> = pool.train.iter().chain(&pool.test).collect();
    let mut r = rng::seeded(0xB0D6E7);
    let mut violations = 0;
    let mut boundary = 0;
    for _ in 0..TRIPLES {
        let inst = instances[r.random_range(0..instances.len())];
        let algorithm = Algorithm::ALL[r.random_range(0..Algorithm::ALL.len())];
        let total = inst.attrs.total_cost();
        let budget = match r.random_range(0..4) {
            // exactly the cost of a random subset: the tightest feasible case
            0 => {
                boundary += 1;
                let k = r.random_range(1..=inst.graph.node_count());
                let picks = rand::seq::index::sample(&mut r, inst.graph.node_count(), k);
                picks.iter().map(|v| inst.attrs.cost(v)).sum::<f64>()
            }
            1 => r.random_range(0.1..inst.attrs.min_cost() * 2.0),
            _ => r.random_range(0.1..total * 1.1),
        };
        let seeds = select_seeds(algorithm, inst, budget, Some(&agent), r.random()).unwrap();
        let recomputed: f64 = seeds.nodes().iter().map(|&v| inst.attrs.cost(v)).sum();
        if seeds.cost() > budget || recomputed > budget {
            violations += 1;
        }
    }

    // RL episodes across several training budgets
    let mut negative = 0;
    let mut bad_terminal = 0;
    let mut transitions = 0;
    for (i, budget) in [7.5, 40.0, 150.0, 333.3].into_iter().enumerate() {
        let tcfg = TrainConfig {
            budget,
            episodes: 30,
            seed: i as u64,
            ..cfg.train_config()
        };
        train_with_observer(&tcfg, &pool, |_, ts| {
            for (j, t) in ts.iter().enumerate() {
                transitions += 1;
                let inst = &pool.train[t.instance];
                if t.budget_after < 0.0 || t.budget_before < 0.0 || t.after.cost() > budget {
                    negative += 1;
                }
                let expected_after = t.budget_before - inst.attrs.cost(t.action);
                let last = j + 1 == ts.len();
                if t.budget_after != expected_after
                    || (t.terminal && !last)
                    || t.terminal != (t.budget_after <= 0.0)
                {
                    bad_terminal += 1;
                }
            }
        })
        .unwrap();
    }
    within(
        Duration::from_secs(120),
        start,
        format!(
            "{TRIPLES} triples ({boundary} at exact subset-cost budgets): {violations} over budget; \
             {transitions} RL transitions: {negative} negative remaining, {bad_terminal} inconsistent"
        ),
        violations == 0 && negative == 0 && bad_terminal == 0,
    )
}

// ---------------------------------------------------------------- 5

/// Direct evaluation of the per-community ratio: benefit of influenced
/// members over benefit of all members, both summed in ascending id order.
fn direct_ratio(labels: &[usize], benefit: &[f64], influenced: &[bool], c: usize) -> f64 {
    let mut got = 0.0;
    let mut all = 0.0;
    for v in 0..labels.len() {
        if labels[v] == c {
            all += benefit[v];
            if influenced[v] {
                got += benefit[v];
            }
        }
    }
    got / all
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<FairnessCase> = vec![
        // hand-computed maximin values
        (
            vec![0, 0, 1],
            vec![5.0, 6.0, 7.0],
            vec![true, false, false],
            Some(0.0),
        ),
        (
            vec![0, 0, 1],
            vec![5.0, 5.0, 7.0],
            vec![true, false, true],
            Some(0.5),
        ),
        (
            vec![0, 1, 0, 1],
            vec![1.0, 3.0, 3.0, 1.0],
            vec![true, true, false, false],
            Some(0.25),
        ),
        (
            vec![0, 1, 1, 1, 1],
            vec![2.0; 5],
            vec![true, true, false, false, false],
            Some(0.25),
        ),
        (
            vec![0, 1, 2],
            vec![1.0, 2.0, 3.0],
            vec![true, true, true],
            Some(1.0),
        ),
        (
            vec![0, 0, 0, 1, 1],
            vec![4.0, 4.0, 2.0, 9.0, 1.0],
            vec![false, true, true, false, true],
            Some(0.1),
        ),
    ];
    let mut r = rng::seeded(0xFA1E);
    while cases.len() < 20 {
        let n = r.random_range(2..=30);
        let k = r.random_range(1..=n.min(5));
        let mut labels: Vec<usize> = (0..n)
            .map(|v| if v < k { v } else { r.random_range(0..k) })
            .collect();
        labels.shuffle(&mut r);
        let benefit = (0..n).map(|_| r.random_range(0.5..100.0)).collect();
        let influenced = match cases.len() % 3 {
            0 => vec![true; n],
            _ => (0..n).map(|_| r.random_bool(0.5)).collect(),
        };
        cases.push((labels, benefit, influenced, None));
    }
    let mut mismatches = Vec::new();
    let (mut zero_cases, mut full_cases) = (0, 0);
    for (i, (labels, benefit, influenced, expected)) in cases.iter().enumerate() {
        let n = labels.len();
        let attrs = NodeAttrs::new(vec![1.0; n], benefit.clone()).unwrap();
        let parts = CommunityPartition::from_labels(labels.clone(), &attrs).unwrap();
        let inf = InfluencedSet::from_mask(influenced.clone());
        let k = parts.count();
        let direct: Vec<f64> = (0..k)
            .map(|c| direct_ratio(labels, benefit, influenced, c))
            .collect();
        let lib: Vec<f64> = (0..k)
            .map(|c| community_benefit_ratio(c, &inf, &attrs, &parts))
            .collect();
        let f = maximin_fairness(&inf, &attrs, &parts);
        let direct_f = direct.iter().copied().fold(f64::INFINITY, f64::min);
        let any_empty = (0..k).any(|c| !(0..n).any(|v| labels[v] == c && influenced[v]));
        let all = influenced.iter().all(|&b| b);
        zero_cases += usize::from(any_empty);
        full_cases += usize::from(all);
        let ok = lib == direct
            && f == direct_f
            && expected.is_none_or(|e| (f - e).abs() <= 1e-15)
            && (!any_empty || f == 0.0)
            && (!all || f == 1.0);
        if !ok {
            mismatches.push(format!("case {i}: lib {lib:?} f={f} direct {direct:?}"));
        }
    }
    within(
        Duration::from_secs(10),
        start,
        format!(
            "20 partitions ({zero_cases} with an uninfluenced community, {full_cases} fully influenced): {} mismatches{}",
            mismatches.len(),
            mismatches.iter().map(|m| format!("; {m}")).collect::<String>()
        ),
        mismatches.is_empty(),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();

    let mut buffer = ReplayBuffer::new(10_000);
    for i in 0..10_010usize {
        buffer.push(i);
    }
    let contents: Vec<usize> = buffer.iter().copied().collect();
    if buffer.len() != 10_000 || contents != (10..10_010).collect::<Vec<_>>() {
        problems.push("replay buffer is not FIFO at capacity".to_string());
    }

    let cfg = TrainConfig::default();
    for e in 1..=720usize {
        let closed = (cfg.epsilon_start * cfg.epsilon_decay.powi(e as i32)).max(cfg.epsilon_min);
        if cfg.epsilon_after(e) != closed {
            problems.push(format!(
                "epsilon_after({e}) = {} != {closed}",
                cfg.epsilon_after(e)
            ));
            break;
        }
    }
    // the same schedule computed by repeated multiplication
    let mut eps = cfg.epsilon_start;
    let mut drift: f64 = 0.0;
    for e in 1..=720usize {
        eps = (eps * cfg.epsilon_decay).max(cfg.epsilon_min);
        drift = drift.max((eps - cfg.epsilon_after(e)).abs() / eps);
    }
    if drift > 1e-12 {
        problems.push(format!(
            "closed form drifts from the recursion by {drift:e}"
        ));
    }

    // a real run: the log's epsilon and gradient-step episodes
    let mut exp = ExperimentConfig::default();
    exp.apply_text(
        "dataset = ba:200:2\nnodes_per_instance = 40\nn_train = 3\nn_test = 1\n\
         train_budget = 60\nepisodes = 720\nembedding_dim = 8\nhidden_dim = 16\n",
    )
    .unwrap();
    let pool = build_pool(&exp).unwrap();
    let tcfg = exp.train_config();
    let outcome = train(&tcfg, &pool).unwrap();
    let mut steps = 0;
    let mut early_skips = 0;
    for entry in &outcome.log {
        let e = entry.episode;
        if entry.epsilon != tcfg.epsilon_after(e - 1) {
            problems.push(format!("episode {e} ran with epsilon {}", entry.epsilon));
        }
        let should = e % tcfg.update_period == 0 && entry.buffer_size >= tcfg.batch_size;
        if entry.loss.is_some() != should {
            problems.push(format!(
                "episode {e}: update {} but expected {should}",
                entry.loss.is_some()
            ));
        }
        if e % 2 == 0 && entry.buffer_size < tcfg.batch_size {
            early_skips += 1;
        }
        steps += usize::from(entry.loss.is_some());
    }
    if steps != outcome.gradient_steps || early_skips == 0 {
        problems.push(format!(
            "{steps} logged steps vs {} counted; {early_skips} skipped for a small buffer",
            outcome.gradient_steps
        ));
    }
    within(
        Duration::from_secs(60),
        start,
        format!(
            "FIFO at 10,010 inserts, epsilon over 720 episodes, {steps} updates ({early_skips} even episodes skipped below 32 transitions); {}",
            if problems.is_empty() { "no problems".to_string() } else { problems.join("; ") }
        ),
        problems.is_empty(),
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let cycle = Graph::from_edges(3, true, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
    let pr = baselines::default_pagerank(&cycle);
    let pr_err = pr
        .scores()
        .iter()
        .map(|s| (s - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);

    // 100 nodes in a 20:80 split with unit costs; a budget of 10 affords 10 seeds
    let g = fairpm::graph::barabasi_albert(100, 2, 0).unwrap();
    let attrs = NodeAttrs::uniform(100, 1.0, 1.0).unwrap();
    let labels: Vec<usize> = (0..100).map(|v| usize::from(v % 5 != 0)).collect();
    let parts = CommunityPartition::from_labels(labels, &attrs).unwrap();
    let parity = baselines::parity_seeds(&g, &attrs, &parts, 10.0);
    let minority = parity
        .nodes()
        .iter()
        .filter(|&&v| parts.label(v) == 0)
        .count();

    let star = Graph::from_edges(6, false, (1..6).map(|v| (0, v, 0.1))).unwrap();
    let star_attrs = NodeAttrs::uniform(6, 1.0, 1.0).unwrap();
    let first = baselines::degree_table(&star).order()[0];
    let hd = baselines::high_degree_seeds(&star, &star_attrs, 1.0);

    within(
        Duration::from_secs(10),
        start,
        format!(
            "PageRank 3-cycle max error {pr_err:.1e}; parity split {minority}/{}; star first pick {first}, B=1 set {:?}",
            parity.len() - minority,
            hd.nodes()
        ),
        pr_err <= 1e-9 && parity.len() == 10 && minority == 2 && first == 0 && hd.nodes() == [0],
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_fairpm");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        "dataset = ba:400:3\nnodes_per_instance = 80\nn_train = 3\nn_test = 2\nbudgets = 100,200,400\n\
         mc_rollouts = 200\nepisodes = 60\ntrain_budget = 400\nseed = 42\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}"));
        let ckpt = out.join("checkpoint.json");
        let status = |args: &[&str]| {
            Command::new(bin)
                .arg("--config")
                .arg(&config)
                .args(args)
                .output()
                .unwrap()
        };
        let t = status(&["train", "--output-dir", out.to_str().unwrap()]);
        let e = status(&[
            "eval",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ]);
        if !t.status.success() || !e.status.success() {
            return Err(format!(
                "cli failed: {}{}",
                String::from_utf8_lossy(&t.stderr),
                String::from_utf8_lossy(&e.stderr)
            ));
        }
        outputs.push((
            fs::read(out.join("results.csv")).unwrap(),
            fs::read(&ckpt).unwrap(),
        ));
    }
    let rows = outputs[0].0.iter().filter(|&&b| b == b'\n').count() - 1;
    within(
        Duration::from_secs(300),
        start,
        format!(
            "two train+eval runs: results.csv identical = {}, checkpoints identical = {}, {rows} rows",
            outputs[0].0 == outputs[1].0,
            outputs[0].1 == outputs[1].1
        ),
        outputs[0].0 == outputs[1].0 && outputs[0].1 == outputs[1].1 && rows == 6 * 3 * 2,
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    assert_eq!(
        (cfg.train.episodes, cfg.mc_rollouts, cfg.budgets.len()),
        (720, 1000, 6)
    );
    assert_eq!(cfg.pool.nodes_per_instance, 500);
    let pool = build_pool(&cfg).unwrap();
    let prepared = prepare_agent(&cfg, &pool).unwrap();
    let trained = start.elapsed();
    let rows = evaluate_pool(&cfg, &pool, Some(&prepared.agent)).unwrap();
    let rl = rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::Rl4fpm)
        .count();
    let sound = rows
        .iter()
        .all(|r| r.seed_cost <= r.budget && r.profit_mean.is_finite());
    within(
        Duration::from_secs(30 * 60),
        start,
        format!(
            "{} test instances of {} nodes, train {:.0}s, {} rows ({rl} rl4fpm)",
            pool.test.len(),
            cfg.pool.nodes_per_instance,
            trained.as_secs_f64(),
            rows.len()
        ),
        sound && rows.len() == 6 * 6 * pool.test.len(),
    )
}

// ----------------------------------------------------------------

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", criterion_1),
        ("gradient correctness", criterion_2),
        ("toy-graph policy optimality", criterion_3),
        ("budget safety", criterion_4),
        ("fairness metric correctness", criterion_5),
        ("training-loop mechanics", criterion_6),
        ("baseline exactness", criterion_7),
        ("determinism", criterion_8),
        ("scale smoke test", criterion_9),
    ];
    let only: Option<BTreeSet<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
