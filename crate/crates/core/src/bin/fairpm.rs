use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fairpm::diffusion::{exact_outcome, SeedSet};
use fairpm::experiment::{
    build_pool, emit_report, evaluate_pool, prepare_agent, AgentSource, Algorithm,
    ExperimentConfig, RunMeta,
};
use fairpm::graph::{self, AttributeRecord, CommunityPartition, NodeAttrs};
use fairpm::trainer::{save_checkpoint, train, write_training_log};
use fairpm::{Error, Result};

/// Fairness-aware profit maximization on social graphs.
#[derive(Parser, Debug)]
#[command(name = "fairpm", version)]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any config key, e.g. `--set gamma=0.9`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train the Q-network on the training instances and save a checkpoint.
    Train(TrainArgs),
    /// Evaluate algorithms on the test instances over the budget grid.
    Eval(EvalArgs),
    /// Exact expectations for a seed set on a tiny graph.
    Oracle(OracleArgs),
    /// Write the sampled instance pool to disk.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Edge-list path, or `ba:<n>:<m>` for a synthetic graph.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    directed: bool,
    /// `node_id,cost,benefit,community` CSV overriding sampled attributes.
    #[arg(long)]
    attributes: Option<String>,
    /// `uniform`, `uniform:<p>` or `trivalency`.
    #[arg(long)]
    probability: Option<String>,
    #[arg(long)]
    n_train: Option<String>,
    #[arg(long)]
    n_test: Option<String>,
    #[arg(long)]
    nodes_per_instance: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    episodes: Option<String>,
    #[arg(long)]
    train_budget: Option<String>,
    #[arg(long)]
    learning_rate: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    train_seed: Option<String>,
    /// Where to write the checkpoint [default: <output_dir>/checkpoint.json].
    #[arg(long)]
    checkpoint_out: Option<PathBuf>,
    /// Per-episode CSV log [default: <output_dir>/train_log.csv].
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Trained checkpoint; without one, rl4fpm is trained first.
    #[arg(long)]
    checkpoint: Option<String>,
    /// Comma-separated ascending budgets.
    #[arg(long)]
    budgets: Option<String>,
    /// Monte Carlo rollouts per evaluation.
    #[arg(short = 'm', long)]
    mc_rollouts: Option<String>,
    /// Comma-separated: rl4fpm,random,high_degree,pagerank,parity,fair_pagerank.
    #[arg(long)]
    algorithms: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    /// Fill the seconds column of results.csv.
    #[arg(long)]
    timing: bool,
    #[arg(long, alias = "out")]
    output_dir: Option<String>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Edge list with an optional probability column.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    directed: bool,
    /// `node_id,cost,benefit,community` CSV; unit costs and benefits and a
    /// single community when omitted.
    #[arg(long)]
    attributes: Option<PathBuf>,
    /// Comma-separated original node ids.
    #[arg(long, default_value = "")]
    seeds: String,
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, alias = "out")]
    output_dir: Option<String>,
}

fn push(overrides: &mut Vec<(&'static str, String)>, key: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        overrides.push((key, v.clone()));
    }
}

impl DataArgs {
    fn overrides(&self, out: &mut Vec<(&'static str, String)>) {
        push(out, "dataset", &self.dataset);
        if self.directed {
            out.push(("directed", "true".into()));
        }
        push(out, "attributes", &self.attributes);
        push(out, "probability", &self.probability);
        push(out, "n_train", &self.n_train);
        push(out, "n_test", &self.n_test);
        push(out, "nodes_per_instance", &self.nodes_per_instance);
        push(out, "seed", &self.seed);
    }
}

fn load_config(cli: &Cli, flags: &[(&'static str, String)]) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path).map_err(|e| match e {
            Error::Io { .. } => Error::Config(e.to_string()),
            e => e,
        })?,
        None => ExperimentConfig::default(),
    };
    for s in &cli.sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {s:?}")))?;
        cfg.set(k, v)?;
    }
    for (k, v) in flags {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn cmd_train(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let mut flags = Vec::new();
    args.data.overrides(&mut flags);
    push(&mut flags, "episodes", &args.episodes);
    push(&mut flags, "train_budget", &args.train_budget);
    push(&mut flags, "learning_rate", &args.learning_rate);
    push(&mut flags, "phi", &args.phi);
    push(&mut flags, "train_seed", &args.train_seed);
    push(&mut flags, "output_dir", &args.output_dir);
    let cfg = load_config(cli, &flags)?;
    let ckpt = args
        .checkpoint_out
        .clone()
        .unwrap_or_else(|| cfg.output_dir.join("checkpoint.json"));
    let log_path = args
        .log
        .clone()
        .unwrap_or_else(|| cfg.output_dir.join("train_log.csv"));

    let pool = build_pool(&cfg)?;
    let tcfg = cfg.train_config();
    let start = Instant::now();
    let outcome = train(&tcfg, &pool)?;
    let seconds = start.elapsed().as_secs_f64();
    for p in [&ckpt, &log_path] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            create_dir(dir)?;
        }
    }
    save_checkpoint(&outcome.agent, &tcfg, &ckpt)?;
    write_training_log(&outcome.log, &log_path)?;
    println!(
        "trained {} episodes ({} gradient steps) in {seconds:.1}s",
        tcfg.episodes, outcome.gradient_steps
    );
    println!("checkpoint: {}", ckpt.display());
    println!("log: {}", log_path.display());
    Ok(())
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<()> {
    let mut flags = Vec::new();
    args.data.overrides(&mut flags);
    push(&mut flags, "checkpoint", &args.checkpoint);
    push(&mut flags, "budgets", &args.budgets);
    push(&mut flags, "mc_rollouts", &args.mc_rollouts);
    push(&mut flags, "algorithms", &args.algorithms);
    push(&mut flags, "tau", &args.tau);
    push(&mut flags, "output_dir", &args.output_dir);
    if args.timing {
        flags.push(("timing", "true".into()));
    }
    let cfg = load_config(cli, &flags)?;
    let pool = build_pool(&cfg)?;
    let mut meta = RunMeta::new(&cfg);
    let prepared = if cfg.algorithms.contains(&Algorithm::Rl4fpm) {
        let p = prepare_agent(&cfg, &pool)?;
        meta.train_config_hash = Some(p.config.hash());
        meta.agent_source = Some(match &p.source {
            AgentSource::Checkpoint(path) => format!("checkpoint {}", path.display()),
            AgentSource::Trained { .. } => "trained in this run".into(),
        });
        Some(p)
    } else {
        None
    };
    let rows = evaluate_pool(&cfg, &pool, prepared.as_ref().map(|p| &p.agent))?;
    emit_report(&rows, &cfg.output_dir, &meta)?;
    println!(
        "{} rows written to {}",
        rows.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let g = graph::load_edge_list(&args.graph, args.directed)?;
    let n = g.node_count();
    let (attrs, parts) = match &args.attributes {
        None => {
            let attrs = NodeAttrs::uniform(n, 1.0, 1.0)?;
            let parts = CommunityPartition::single(&attrs)?;
            (attrs, parts)
        }
        Some(path) => {
            let table = graph::read_attribute_table(path)?;
            let mut recs = Vec::with_capacity(n);
            for &id in g.original_ids() {
                recs.push(*table.get(id).ok_or_else(|| {
                    Error::InvalidParameter(format!("node {id} missing from {}", path.display()))
                })?);
            }
            let attrs = NodeAttrs::new(
                recs.iter().map(|r| r.cost).collect(),
                recs.iter().map(|r| r.benefit).collect(),
            )?;
            let labels: Vec<usize> = recs.iter().map(|r| r.community).collect();
            let parts = CommunityPartition::from_sparse_labels(&labels, &attrs)?;
            (attrs, parts)
        }
    };
    let mut dense = BTreeSet::new();
    for tok in args
        .seeds
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        let id: u64 = tok
            .parse()
            .map_err(|_| Error::Config(format!("bad seed id {tok:?}")))?;
        let v = g.original_ids().binary_search(&id).map_err(|_| {
            Error::InvalidParameter(format!("seed {id} is not a node of the graph"))
        })?;
        dense.insert(v);
    }
    let seeds = SeedSet::new(dense, &attrs)?;
    let o = exact_outcome(&g, &attrs, Some(&parts), &seeds)?;
    let profit = if seeds.is_empty() {
        0.0
    } else {
        o.benefit - seeds.cost()
    };
    println!("spread = {}", o.spread);
    println!("benefit = {}", o.benefit);
    println!("cost = {}", seeds.cost());
    println!("profit = {profit}");
    println!("fairness = {}", o.fairness);
    println!("shaped = {}", profit + args.phi * o.fairness);
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry {
    split: &'static str,
    id: usize,
    seed: u64,
    nodes: usize,
    edges: usize,
    edge_file: String,
    attribute_file: String,
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> Result<()> {
    let mut flags = Vec::new();
    args.data.overrides(&mut flags);
    push(&mut flags, "output_dir", &args.output_dir);
    let cfg = load_config(cli, &flags)?;
    let pool = build_pool(&cfg)?;
    let dir = &cfg.output_dir;
    create_dir(dir)?;
    let mut manifest = Vec::new();
    for (split, list) in [("train", &pool.train), ("test", &pool.test)] {
        for inst in list {
            let stem = format!("{split}_{:03}", inst.id);
            let edge_file = format!("{stem}.edges");
            let attribute_file = format!("{stem}.attrs.csv");
            graph::write_edge_list(&inst.graph, dir.join(&edge_file))?;
            let records = (0..inst.graph.node_count()).map(|v| AttributeRecord {
                node_id: inst.graph.original_id(v),
                cost: inst.attrs.cost(v),
                benefit: inst.attrs.benefit(v),
                community: inst.parts.label(v),
            });
            graph::write_attribute_table(dir.join(&attribute_file), records)?;
            manifest.push(ManifestEntry {
                split,
                id: inst.id,
                seed: inst.seed,
                nodes: inst.graph.node_count(),
                edges: inst.graph.edge_count(),
                edge_file,
                attribute_file,
            });
        }
    }
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    fs::write(dir.join("config.txt"), cfg.to_text()).map_err(|e| Error::Io {
        path: dir.join("config.txt"),
        source: e,
    })?;
    println!("{} instances written to {}", manifest.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Train(a) => cmd_train(&cli, a),
        Command::Eval(a) => cmd_eval(&cli, a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Sample(a) => cmd_sample(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
